# Spectral module — Weyl characters, Hecke counts and Whittaker values

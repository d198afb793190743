# Roots module — Cartan data, coweights and Weyl group enumeration

# Shintani–Casselman–Shalika toolkit — root data, characters, walks and p-adic simulation

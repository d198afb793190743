# Borel module — unipotent arithmetic and Borel random walk simulation

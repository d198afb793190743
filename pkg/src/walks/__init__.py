# Walks module — chamber random walks, survival routes and reflection principle

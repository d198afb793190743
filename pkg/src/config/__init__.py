# Config module — run configuration

# Price file parsing and market manifests

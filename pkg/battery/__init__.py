# Per-stock fact battery, market verdicts and clustering

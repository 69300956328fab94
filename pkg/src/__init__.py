# Small-fibre maps

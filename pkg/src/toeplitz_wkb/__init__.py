"""WKB quasimodes for Berezin-Toeplitz operators."""
__version__ = "0.1.0"

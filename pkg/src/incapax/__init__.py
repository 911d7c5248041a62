"""Zero-capacity certificates for quantum channels from forbidden transformations."""

__version__ = "0.1.0"

"""Base-extension semantics and proof search for IMLL and IPL."""

__version__ = "0.1.0"

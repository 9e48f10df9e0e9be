"""Deterministic permanent approximation toolkit."""
__version__ = "0.1.0"

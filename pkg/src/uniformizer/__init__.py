"""Exact monomial valuations and local-uniformization certificates."""

__version__ = "0.1.0"

"""Exact-arithmetic laboratory for the Chacon transformation."""

__version__ = "0.1.0"

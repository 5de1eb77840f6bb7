"""Exact root counting for sparse polynomials over the p-adic numbers."""

__version__ = "0.1.0"

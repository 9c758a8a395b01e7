"""Exact computation with systems of quadratic forms over finite and p-adic fields."""

__version__ = "0.1.0"

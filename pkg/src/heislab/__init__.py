"""Numerical and symbolic laboratory for sums-of-squares operators on the Heisenberg group."""

__version__ = "0.1.0"

"""Generalized translation operators, moduli of smoothness and weighted
polynomial approximation on [-1, 1]."""

__version__ = "0.1.0"

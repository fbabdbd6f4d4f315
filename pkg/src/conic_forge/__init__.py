"""Conic bundles of graded-free type over P^3: construction and certification over F_p."""

__version__ = "0.1.0"

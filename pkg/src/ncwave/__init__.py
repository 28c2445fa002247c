"""Noncommutative-geometry wave operators and black-hole numerics."""
__version__ = "0.1.0"

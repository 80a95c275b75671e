"""Exact good-basis tests and well-rounded twists of ideal lattices in real cyclic cubic fields."""

__version__ = "0.1.0"

"""Exact computations with Soergel modules, stalk polynomials and tilting multiplicities."""

__version__ = "0.1.0"

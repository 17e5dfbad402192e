"""Exact combinatorics of SL2-actions on affine varieties with torus action."""
__version__ = "0.1.0"

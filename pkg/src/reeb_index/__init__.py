"""Symplectic path indices, Bott functions and toric contact homology."""

__version__ = "0.1.0"

"""Numerics for wave and Poisson kernels on noncompact symmetric spaces."""

__version__ = "0.1.0"

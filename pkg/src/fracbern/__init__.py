"""Fractional Laplacian heat kernels and Bernstein-type inequalities."""

__version__ = "0.1.0"

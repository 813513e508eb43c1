"""Exact computation of torus fixed-point data, stable-envelope restriction
matrices, and divisor-multiplication operators for symplectic resolutions of
affine Grassmannian slices."""

__version__ = "0.1.0"

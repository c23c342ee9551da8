"""Numerical laboratory for squeezing functions, conformal moduli and slit maps."""

__version__ = "0.1.0"

"""Lattice-point counting in SL_n(Z) Frobenius balls and its spectral error analysis."""

__version__ = "0.1.0"

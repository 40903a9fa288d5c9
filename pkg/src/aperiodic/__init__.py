"""Periodic approximation of aperiodic subshifts and the spectra of their Jacobi operators."""

__version__ = "0.1.0"

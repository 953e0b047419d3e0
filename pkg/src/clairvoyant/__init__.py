"""Simulation and verification tools for two-sequence directed percolation."""

__version__ = "0.1.0"

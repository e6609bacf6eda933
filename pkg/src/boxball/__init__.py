"""Multicolor box-ball systems: carriers, invariants, equilibrium and fluctuations."""
__version__ = "0.1.0"

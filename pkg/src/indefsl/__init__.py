"""Spectral classification of indefinite Sturm-Liouville operators with finite-zone potentials."""
__version__ = "0.1.0"

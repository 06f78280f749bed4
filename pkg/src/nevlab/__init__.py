"""Numerical laboratory for Nevanlinna theory driven by Brownian motion on model surfaces."""

__version__ = "0.1.0"

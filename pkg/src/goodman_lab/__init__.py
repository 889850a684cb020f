"""Exact and numerical tools for steady curves, surgery annuli and the surgery graph of a hyperbolic torus bundle."""

__version__ = "0.1.0"

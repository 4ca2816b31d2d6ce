"""Flip-twist moves on (double) pants decompositions with exact homology certification."""

from .lattice import SurfaceSig

__all__ = ["SurfaceSig"]
__version__ = "0.1.0"

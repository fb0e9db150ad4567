"""Burnside functors, cubical flow categories and equivariant Khovanov homology."""

__version__ = "0.1.0"

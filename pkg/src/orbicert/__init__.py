"""Periodic-orbit certification for planar flows via combinatorial dynamics."""

__version__ = "0.1.0"

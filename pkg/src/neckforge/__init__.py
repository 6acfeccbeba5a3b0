"""Radial numerics for neck gluing of Kähler-Einstein potentials."""

__version__ = "0.1.0"

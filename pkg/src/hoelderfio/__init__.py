"""Numerical laboratory for collision-type Fourier integral operators with Hoelder phases."""

__version__ = "0.1.0"

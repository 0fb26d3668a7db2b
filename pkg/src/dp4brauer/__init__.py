"""Brauer classes of degree four del Pezzo surfaces: group computation, local evaluation and working sets."""

__version__ = "0.1.0"

"""Numerical laboratory for multiple ergodic averages of commuting maps."""

__version__ = "0.1.0"

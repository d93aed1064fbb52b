"""Numerical checks of discrete-spectrum criteria for Schroedinger-type operators."""

__version__ = "0.1.0"

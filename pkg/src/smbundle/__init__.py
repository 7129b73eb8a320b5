"""Numerical model of the standard model written as connections on vector bundles over a space-time chart."""

__version__ = "0.1.0"

"""Constellation sizing against a sun-fixed spatiotemporal demand model."""

__version__ = "0.1.0"

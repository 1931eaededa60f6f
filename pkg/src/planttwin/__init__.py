"""Desk-scale digital twin of a plant factory."""

__version__ = "0.1.0"

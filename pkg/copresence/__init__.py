"""Uncertainty-aware multi-weather co-presence estimation."""

__version__ = "0.1.0"

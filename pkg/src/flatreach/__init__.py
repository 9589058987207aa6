"""Flat norm minimizers, reach estimation and the reach lower bound for planar boundaries."""
__version__ = "0.1.0"

"""Relative trace formula toolkit for toric periods over Q at desk scale."""

__version__ = "0.1.0"

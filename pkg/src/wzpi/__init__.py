"""Certified WZ proofs of Ramanujan-type series for 1/pi."""

__version__ = "0.1.0"

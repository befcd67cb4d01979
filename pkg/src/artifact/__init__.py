"""Exact certificates for graded-trace D-modules of hypertoric varieties and
rank-two Springer resolutions."""

__version__ = "0.1.0"

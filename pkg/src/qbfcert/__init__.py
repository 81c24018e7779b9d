"""Certified QBF preprocessing: simplify, solve, reconstruct, check."""

__version__ = "0.1.0"

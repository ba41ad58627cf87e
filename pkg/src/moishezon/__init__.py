"""Exact intersection numbers, multiplier ideals and contraction bounds for
Moishezon manifold constructions."""

__version__ = "0.1.0"

"""Pants-path combinatorics for end-periodic surface maps: Farey distances,
block decompositions of drilled mapping tori, volume bounds and
irreducibility certificates."""

from __future__ import annotations

__version__ = "0.1.0"

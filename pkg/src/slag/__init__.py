"""Quartic SLag - exact and numerical checks for special Lagrangian loci in G(2,4)."""

__version__ = "0.1.0"

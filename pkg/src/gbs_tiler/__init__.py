"""Strongly aperiodic constructions on generalized Baumslag-Solitar groups, at patch scale."""

__version__ = "0.1.0"

"""Exact Bell-polytope tools for interference-channel sum capacities."""
__version__ = "0.1.0"

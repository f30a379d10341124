"""Quantum-walk search on the simplex of complete graphs."""

__version__ = "0.1.0"

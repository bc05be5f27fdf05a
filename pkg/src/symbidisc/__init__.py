"""Numerical workbench for operator pairs on the symmetrized bidisc."""

__version__ = "0.1.0"

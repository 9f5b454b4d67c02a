"""Algebraic program analysis over regular path expressions."""

__version__ = "0.1.0"

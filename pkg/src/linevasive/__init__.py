"""Explicit line-evasive sets from norm polynomials, with exhaustive verifiers."""

__version__ = "0.1.0"

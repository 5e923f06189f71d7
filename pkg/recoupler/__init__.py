"""Hadamard-matrix pulse compiler and verifier for heteronuclear spin systems."""

__version__ = "0.1.0"

"""Decoded Quantum Interferometry circuits for Max-XORSAT: construction, resource counts and simulation."""

__version__ = "0.1.0"

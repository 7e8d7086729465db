"""Exact BPS invariants of sheaves on Hirzebruch surfaces and their modular completions."""

__version__ = "0.1.0"

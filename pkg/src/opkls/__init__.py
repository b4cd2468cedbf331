"""Exact computations for operadic Kazhdan-Lusztig-Stanley theory on geometric lattices."""

__version__ = "0.1.0"

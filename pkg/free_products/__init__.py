"""Exact combinatorics of non-crossing partitions and products of free random variables."""

from free_products.__version__ import __version__

__all__ = ["__version__"]

"""Metadata for the free products package."""

__title__ = "free_products"
__description__ = "Exact combinatorics of k-divisible non-crossing partitions and products of free random variables"
__version__ = "0.1.0"
__author__ = "free_products maintainers"
__author_email__ = "maintainers@free-products.invalid"
__license__ = "Apache 2.0"
__url__ = "https://github.com/free-products/free-products"

"""Exact verification engine for q-supercongruences on convolution sums."""

__version__ = "0.1.0"

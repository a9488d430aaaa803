"""Two-hop question dataset construction and evaluation toolkit."""

__version__ = "0.1.0"

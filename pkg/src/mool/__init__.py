"""MOOL: a mini concurrent object-oriented language with usage types."""

__version__ = "0.1.0"

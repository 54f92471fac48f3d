"""Desk-scale laboratory for ordinal walks and finite forcing combinatorics."""

from .ordinal import Ordinal, parse, format_ordinal

__all__ = ["Ordinal", "parse", "format_ordinal"]
__version__ = "0.1.0"

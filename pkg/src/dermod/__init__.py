"""Derived moduli of local systems on finite semi-simplicial sets, computed exactly over Q."""

from .errors import (
    DermodError,
    InvalidPointError,
    InvalidSpaceError,
    NonFlatError,
    NotAComplexError,
    ParseError,
)

__version__ = "0.1.0"

__all__ = [
    "DermodError",
    "InvalidPointError",
    "InvalidSpaceError",
    "NonFlatError",
    "NotAComplexError",
    "ParseError",
    "__version__",
]

"""Exact toolkit for uniform intersecting families."""

from .core import Family, FamilyError, Params

__version__ = "0.1.0"
__all__ = ["Family", "FamilyError", "Params", "__version__"]

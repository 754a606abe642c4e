"""Figures from the halfwave CLI's CSV reports."""

__version__ = "0.1.0"

from .plots import FigureKind, FigureSpec, plot  # noqa: F401
from .schemas import SchemaError  # noqa: F401

"""Weighted double bubbles in R^n: construction, relative area, and
Gauss-map calibration checks for surfaces of revolution."""

from .errors import ClassMismatch, DomainError, NumericalFailure, StructuralError

__version__ = "0.1.0"

__all__ = [
    "ClassMismatch",
    "DomainError",
    "NumericalFailure",
    "StructuralError",
    "__version__",
]

"""Weak detection of a rank-one spike in a Wigner matrix."""

from ._core import (
    critical_value,
    detect,
    detect_transformed,
    error_curve,
    fisher_functionals,
    limiting_moments,
    optimize_t,
    simulate,
    theoretical_error,
)

__all__ = [
    "critical_value",
    "detect",
    "detect_transformed",
    "error_curve",
    "fisher_functionals",
    "limiting_moments",
    "optimize_t",
    "simulate",
    "theoretical_error",
]

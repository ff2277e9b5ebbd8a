"""Input validation helpers shared across the package."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np

#: Tolerance used when comparing densities against the feasibility region.
DENSITY_TOL = 1e-12


class DomainError(ValueError):
    """Raised when parameters fall outside the physical domain of an operation."""


def check_finite(**values: float) -> None:
    for name, value in values.items():
        if not isinstance(value, Real) or not math.isfinite(value):
            raise DomainError(f"{name} must be a finite real number, got {value!r}")


def check_densities(n_s: float, n_d: float, tol: float = DENSITY_TOL) -> tuple[float, float]:
    """Validate a pair of site densities and snap tiny rounding excursions.

    Returns the (possibly clipped) pair. Raises :class:`DomainError` when the
    pair lies outside ``0 <= n_s, n_d`` and ``n_s + n_d <= 1`` by more than
    ``tol``.
    """
    check_finite(n_s=n_s, n_d=n_d)
    if n_s < -tol or n_d < -tol or n_s + n_d > 1 + tol:
        raise DomainError(f"invalid densities n_s={n_s}, n_d={n_d}")
    n_s = min(max(float(n_s), 0.0), 1.0)
    n_d = min(max(float(n_d), 0.0), 1.0 - n_s)
    return n_s, n_d


def check_positive_int(name: str, value, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_unit_interval(name: str, value: float, tol: float = 0.0) -> float:
    check_finite(**{name: value})
    if value < -tol or value > 1 + tol:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return min(max(float(value), 0.0), 1.0)


def check_square(matrix) -> np.ndarray:
    arr = np.asarray(matrix)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {arr.shape}")
    return arr

"""Ground-state phase diagram of the bond-charge Hubbard chain at x = 1.

In the thermodynamic limit the ground state is fixed by two densities, the
fraction ``n_s`` of singly occupied sites and the fraction ``n_d`` of doubly
occupied sites. They minimise the energy density

    E(n_s, n_d) = -(2/pi) sin(pi n_s) - 2 mu n_d - (mu + u/2) n_s

over the simplex ``n_s, n_d >= 0``, ``n_s + n_d <= 1``. The chemical-potential
picture ``(u, mu)`` and the filling picture ``(u, n)`` are both supported.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._validation import DomainError, check_densities, check_finite

#: Tolerance for resolving points that sit exactly on a phase boundary.
BOUNDARY_TOL = 1e-12


class PhaseLabel(str, enum.Enum):
    """Ground-state phases. EMPTY and FULL are the unnamed saturated corners."""

    I = "I"  # noqa: E741
    I_PRIME = "I'"
    II = "II"
    III = "III"
    IV = "IV"
    EMPTY = "EMPTY"
    FULL = "FULL"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ModelPoint:
    """A point of the phase diagram together with its ground-state densities.

    Exactly one of ``mu`` or ``n`` is given by the caller; the other one is
    ``None`` for ``mu`` and derived for ``n``.
    """

    u: float
    n_s: float
    n_d: float
    phase: PhaseLabel
    mu: float | None = None
    n: float | None = None

    def __post_init__(self):
        check_densities(self.n_s, self.n_d)
        if self.n is not None and abs(self.n - (self.n_s + 2 * self.n_d)) > 1e-10:
            raise DomainError("filling n must equal n_s + 2 n_d")

    @property
    def filling(self) -> float:
        return self.n_s + 2.0 * self.n_d

    @property
    def odlro(self) -> float:
        return odlro(self.n_s, self.n_d)


def _arccos_density(arg: float) -> float:
    # Clamping encodes the saturated phases (n_s = 0 or 1).
    return math.acos(min(1.0, max(-1.0, arg))) / math.pi


def ground_state_densities(u: float, mu: float) -> tuple[float, float]:
    """Closed-form minimiser ``(n_s, n_d)`` of the energy density at ``(u, mu)``."""
    check_finite(u=u, mu=mu)
    if abs(mu) < BOUNDARY_TOL:
        n_s = _arccos_density(-u / 4.0)
        return n_s, (1.0 - n_s) / 2.0
    if mu < 0:
        return _arccos_density(-mu / 2.0 - u / 4.0), 0.0
    n_s = _arccos_density(mu / 2.0 - u / 4.0)
    return n_s, 1.0 - n_s


def classify_phase(u: float, mu: float) -> PhaseLabel:
    """Phase label in the ``(u, mu)`` plane.

    Points on a boundary are assigned to the phase whose defining interval is
    closed (I, I', II), within :data:`BOUNDARY_TOL`.
    """
    check_finite(u=u, mu=mu)
    tol = BOUNDARY_TOL
    if abs(mu) < tol:
        if -4.0 - tol <= u <= 4.0 + tol:
            return PhaseLabel.II
        return PhaseLabel.IV if u > 4.0 else PhaseLabel.III
    if mu < 0:
        lo, hi = -4.0 - 2.0 * mu, 4.0 - 2.0 * mu
        if lo - tol <= u <= hi + tol:
            return PhaseLabel.I
        return PhaseLabel.IV if u > hi else PhaseLabel.EMPTY
    # particle-hole mirror of the mu < 0 half plane
    lo, hi = -4.0 + 2.0 * mu, 4.0 + 2.0 * mu
    if lo - tol <= u <= hi + tol:
        return PhaseLabel.I_PRIME
    return PhaseLabel.IV if u > hi else PhaseLabel.FULL


def densities_at_filling(u: float, n: float) -> tuple[float, float]:
    """Ground-state densities at fixed filling ``n = n_s + 2 n_d`` in ``[0, 2]``.

    At fixed filling the chemical potential adjusts itself; singly occupied
    sites take the density they would have on the ``mu = 0`` line, capped by
    the available electrons (holes) when ``n < 1`` (``n > 1``).
    """
    check_finite(u=u, n=n)
    if n < -BOUNDARY_TOL or n > 2 + BOUNDARY_TOL:
        raise DomainError(f"filling must lie in [0, 2], got {n}")
    n = min(max(n, 0.0), 2.0)
    n_s = min(_arccos_density(-u / 4.0), n, 2.0 - n)
    n_d = max(0.0, (n - n_s) / 2.0)
    return n_s, min(n_d, 1.0 - n_s)


def classify_filling(u: float, n: float) -> PhaseLabel:
    """Phase label in the ``(u, n)`` plane."""
    n_s, n_d = densities_at_filling(u, n)
    tol = BOUNDARY_TOL
    if n <= tol:
        return PhaseLabel.EMPTY
    if n >= 2 - tol:
        return PhaseLabel.FULL
    if n_s >= 1 - tol:
        return PhaseLabel.II if u <= 4.0 + tol else PhaseLabel.IV
    if n_d <= tol:
        return PhaseLabel.I
    if n_s + n_d >= 1 - tol:
        return PhaseLabel.I_PRIME
    if u < -4.0 - tol:
        return PhaseLabel.III
    return PhaseLabel.II


def energy_density(n_s: float, n_d: float, u: float, mu: float) -> float:
    n_s, n_d = check_densities(n_s, n_d)
    check_finite(u=u, mu=mu)
    return -(2.0 / math.pi) * math.sin(math.pi * n_s) - 2.0 * mu * n_d - (mu + u / 2.0) * n_s


def odlro(n_s: float, n_d: float) -> float:
    """Long-distance pair coherence ``n_d (1 - n_d - n_s)``."""
    n_s, n_d = check_densities(n_s, n_d)
    return n_d * (1.0 - n_d - n_s)


def model_point(u: float, mu: float) -> ModelPoint:
    n_s, n_d = ground_state_densities(u, mu)
    return ModelPoint(u=float(u), mu=float(mu), n_s=n_s, n_d=n_d, phase=classify_phase(u, mu))


def model_point_at_filling(u: float, n: float) -> ModelPoint:
    n_s, n_d = densities_at_filling(u, n)
    return ModelPoint(u=float(u), n=n_s + 2 * n_d, n_s=n_s, n_d=n_d, phase=classify_filling(u, n))


def phase_diagram(u_values, mu_values) -> list[ModelPoint]:
    """Evaluate :func:`model_point` on the Cartesian grid, ``u`` varying slowest."""
    return [model_point(float(u), float(mu)) for u in np.asarray(u_values) for mu in np.asarray(mu_values)]

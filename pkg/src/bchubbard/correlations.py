"""Entropic and entanglement measures between two subsystems.

All entropies are in bits. Measurements for discord and classical
correlations are performed on the *second* tensor factor; the reported
classical correlation is the information gained about the first factor.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from ._validation import DomainError, check_unit_interval
from .rdm import DensityMatrix, as_density_matrix, partial_trace, two_mode_rdm

#: Eigenvalues below this (after clamping) are treated as exact zeros.
NEGATIVE_EIGEN_TOL = 1e-10
#: Maximum corner coherence accepted by the X-state formula.
CORNER_TOL = 1e-12

METHODS = ("analytic_xstate", "closed_form", "numeric_qutrit", "kspace")


@dataclass(frozen=True)
class CorrelationRecord:
    """Pairwise correlation measures for one pair of subsystems (bits).

    ``K`` is NaN when the pair is not a pair of qubits.
    """

    I: float  # noqa: E741
    C: float
    Q: float
    K: float
    N: float
    S_single: float
    method: str

    def as_dict(self) -> dict:
        return asdict(self)


def shannon_entropy(probs) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p))) + 0.0  # avoid -0.0


def binary_entropy(p: float) -> float:
    return shannon_entropy([p, 1.0 - p])


def _spectrum(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.eigenvalues
    w = np.linalg.eigvalsh(np.asarray(rho))
    if w[0] < -NEGATIVE_EIGEN_TOL:
        raise DomainError(f"matrix has negative eigenvalue {w[0]!r}")
    return np.clip(w, 0.0, None)


def von_neumann_entropy(rho) -> float:
    return shannon_entropy(_spectrum(rho))


def marginal_entropies(rho: DensityMatrix) -> tuple[float, float, float]:
    """Entropies ``(S_A, S_B, S_AB)`` of a bipartite state."""
    rho = as_density_matrix(rho)
    if not rho.is_bipartite:
        raise DomainError("expected a bipartite density matrix")
    s_a = von_neumann_entropy(partial_trace(rho.data, rho.dims, 0))
    s_b = von_neumann_entropy(partial_trace(rho.data, rho.dims, 1))
    return s_a, s_b, von_neumann_entropy(rho)


def mutual_information(rho) -> float:
    s_a, s_b, s_ab = marginal_entropies(rho)
    return max(0.0, s_a + s_b - s_ab)


def conditional_entropy_vectors(rho: DensityMatrix, vectors: np.ndarray) -> np.ndarray:
    """Post-measurement conditional entropy of factor A for batches of bases on B.

    Parameters
    ----------
    rho : DensityMatrix
        Bipartite state with dims ``(d_a, d_b)``.
    vectors : ndarray of shape (..., d_b, d_b)
        Orthonormal measurement vectors stored as *columns*.

    Returns
    -------
    ndarray of shape (...)
        ``sum_k p_k S(rho_A|k)`` for every basis in the batch.
    """
    d_a, d_b = rho.dims
    v = np.asarray(vectors)
    if v.shape[-2:] != (d_b, d_b):
        raise DomainError(f"basis shape {v.shape[-2:]} does not match factor dimension {d_b}")
    return _conditional_entropy_outer(rho, _measurement_outer(v))


def _measurement_outer(v: np.ndarray) -> np.ndarray:
    # rows (b, d) of |v_k><v_k| for every basis vector k, shape (..., d_b, d_b * d_b)
    d_b = v.shape[-1]
    outer = v.conj()[..., :, None, :] * v[..., None, :, :]
    return np.ascontiguousarray(np.moveaxis(outer.reshape(v.shape[:-2] + (d_b * d_b, d_b)), -1, -2))


def _conditional_entropy_outer(rho: DensityMatrix, outer: np.ndarray) -> np.ndarray:
    d_a, d_b = rho.dims
    t = rho.data.reshape(d_a, d_b, d_a, d_b)
    # unnormalised conditional states M_k = <v_k|_B rho |v_k>_B, as one matrix product
    kernel = t.transpose(1, 3, 0, 2).reshape(d_b * d_b, d_a * d_a)
    m = (outer.reshape(-1, d_b * d_b) @ kernel).reshape(outer.shape[:-1] + (d_a, d_a))
    p = np.einsum("...kaa->...k", m).real
    if d_a == 2:
        # closed-form 2x2 spectrum; much faster than eigvalsh on large batches
        half = 0.5 * p
        det = m[..., 0, 0].real * m[..., 1, 1].real - np.abs(m[..., 0, 1]) ** 2
        root = np.sqrt(np.clip(half * half - det, 0.0, None))
        w = np.stack([half - root, half + root], axis=-1)
    else:
        w = np.linalg.eigvalsh(m)
    # sum_k p_k S(M_k / p_k) = sum_k [sum_i h(w_ki) - h(p_k)] with h(x) = -x log x
    w = np.clip(w, 0.0, None)
    p = np.clip(p, 0.0, None)
    nats = np.sum(entr(w), axis=-1) - entr(p)
    return np.clip(np.sum(nats, axis=-1), 0.0, None) / math.log(2.0)


# -- X states -----------------------------------------------------------------


@dataclass(frozen=True)
class AliBranch:
    """Both candidate minima of the conditional entropy for an X state."""

    theta1: float
    theta2: float
    theta3: float
    p0: float
    S1: float
    S2: float

    @property
    def minimum(self) -> float:
        return min(self.S1, self.S2)


def _bloch_entropy(theta: float) -> float:
    theta = min(max(theta, 0.0), 1.0)
    return binary_entropy((1.0 - theta) / 2.0)


def _ratio(diff: float, total: float) -> float:
    return abs(diff) / abs(total) if total > 0 else 0.0


def xstate_branches(rho) -> AliBranch:
    """Conditional entropies for measurements along x (``S1``) and z (``S2``) on B."""
    rho = as_density_matrix(rho, (2, 2))
    if rho.dims != (2, 2):
        raise DomainError("X-state formulas need a two-qubit matrix")
    m = rho.data
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    off[1, 2] = off[2, 1] = 0.0
    if np.max(np.abs(off)) > CORNER_TOL:
        raise DomainError("matrix is not an X state with vanishing corner coherence")
    r11, r22, r33, r44 = m.diagonal().real
    theta1 = math.sqrt((r11 - r33 + r22 - r44) ** 2 + 4.0 * abs(m[1, 2]) ** 2)
    p0 = r11 + r33
    theta2 = _ratio(r22 - r44, r22 + r44)
    theta3 = _ratio(r11 - r33, r11 + r33)
    s1 = _bloch_entropy(theta1)
    s2 = (1.0 - p0) * _bloch_entropy(theta2) + p0 * _bloch_entropy(theta3)
    return AliBranch(theta1, theta2, theta3, p0, s1, s2)


def discord_cc_xstate(rho) -> tuple[float, float, AliBranch]:
    """Quantum discord and classical correlations of an X state with ``rho_14 = 0``.

    Returns
    -------
    Q, C : float
        Discord and classical correlations in bits.
    branch : AliBranch
        The two candidate conditional entropies and their parameters.
    """
    rho = as_density_matrix(rho, (2, 2))
    branch = xstate_branches(rho)
    s_a, s_b, s_ab = marginal_entropies(rho)
    if s_a < 1e-12 or s_b < 1e-12:
        return 0.0, 0.0, branch
    mi = s_a + s_b - s_ab
    cc = s_a - branch.minimum
    return mi - cc, cc, branch


def discord_region3_closed_form(n_d: float) -> float:
    """Site-pair discord in the pure eta-pair phase as a function of ``n_d``.

    Valid for ``0 < n_d <= 1/2``; use the symmetry ``n_d -> 1 - n_d`` beyond.
    """
    if not 0.0 < n_d <= 0.5:
        raise DomainError(f"n_d must lie in (0, 1/2], got {n_d}")
    x = n_d * (1.0 - n_d)
    s = math.sqrt(max(0.0, 1.0 - 4.0 * x))
    sqrt_term = 0.0 if s == 0.0 else s * math.log(-1.0 - 2.0 / (-1.0 + s))
    value = (
        4.0 * x * math.atanh(1.0 - 2.0 * x)
        + x * math.log(16.0)
        + sqrt_term
        + math.log(1.0 / (x - 1.0) ** 2)
        + math.log(x)
    )
    return value / math.log(4.0)


# -- momentum space -----------------------------------------------------------


def discord_kspace(a: float) -> float:
    """Discord ``2a(1-a)`` of a ``(k, -k)`` mode pair.

    The measurement in the occupation basis of ``-k`` leaves pure conditional
    states; this is checked on the explicit 16x16 matrix.
    """
    a = check_unit_interval("a", a)
    rho = two_mode_rdm(a, paired=True)
    residual = conditional_entropy_vectors(rho, np.eye(4)[None])[0]
    if residual > 1e-12:
        raise RuntimeError(f"occupation-basis conditional entropy is {residual}, expected 0")
    return 2.0 * a * (1.0 - a)


# -- entanglement -------------------------------------------------------------

_SIGMA_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = as_density_matrix(rho, (2, 2))
    if rho.dims != (2, 2):
        raise DomainError("concurrence is defined here for two qubits only")
    m = rho.data
    flipped = _SIGMA_YY @ m.conj() @ _SIGMA_YY
    lam = np.sqrt(np.clip(np.linalg.eigvals(m @ flipped).real, 0.0, None))
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_region1(n_s: float, gamma_value: float) -> float:
    """Closed-form concurrence of the empty/singly-occupied site pair."""
    g2 = gamma_value**2
    radicand = max(0.0, ((1.0 - n_s) ** 2 - g2) * (n_s**2 - g2))
    return max(0.0, 2.0 * (abs(gamma_value) - math.sqrt(radicand)))


def partial_transpose(rho, dims=None, system: int = 1) -> np.ndarray:
    rho = as_density_matrix(rho, dims)
    d_a, d_b = rho.dims
    t = rho.data.reshape(d_a, d_b, d_a, d_b)
    t = t.transpose(0, 3, 2, 1) if system == 1 else t.transpose(2, 1, 0, 3)
    return t.reshape(d_a * d_b, d_a * d_b)


def negativity(rho, dims=None) -> float:
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    w = np.linalg.eigvalsh(partial_transpose(rho, dims))
    return float(max(0.0, -np.sum(w[w < 0.0])))


# -- brute-force measurement oracle -----------------------------------------------


def _qubit_bases(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Orthonormal qubit bases (as columns) for Bloch direction ``(theta, phi)``."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    e = np.exp(1j * phi)
    v = np.empty(np.broadcast(theta, phi).shape + (2, 2), dtype=complex)
    v[..., 0, 0] = c
    v[..., 1, 0] = s * e
    v[..., 0, 1] = -s * np.conj(e)
    v[..., 1, 1] = c
    return v


@functools.lru_cache(maxsize=4)
def _bloch_grid(n_theta: int, n_phi: int):
    theta = np.linspace(0.0, math.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    outer = _measurement_outer(_qubit_bases(tt, pp))
    outer.setflags(write=False)
    return theta, phi, outer


def bloch_grid_conditional_entropy(rho, n_theta: int = 400, n_phi: int = 400, refine: bool = True) -> float:
    """Minimum conditional entropy over all projective qubit measurements on B.

    A uniform grid over both Bloch angles is followed by one local simplex
    polish from the best grid point. Makes no assumption on the state's shape.
    """
    rho = as_density_matrix(rho, (2, 2))
    theta, phi, outer = _bloch_grid(n_theta, n_phi)
    values = _conditional_entropy_outer(rho, outer)
    k = np.unravel_index(np.argmin(values), values.shape)
    best = float(values[k])
    if refine:

        def objective(x):
            return float(conditional_entropy_vectors(rho, _qubit_bases(np.array(x[0]), np.array(x[1])))[()])

        res = minimize(
            objective,
            [theta[k[0]], phi[k[1]]],
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-13},
        )
        best = min(best, float(res.fun))
    return best


def discord_bloch_oracle(rho, n_theta: int = 400, n_phi: int = 400) -> tuple[float, float]:
    """``(Q, C)`` from :func:`bloch_grid_conditional_entropy`."""
    rho = as_density_matrix(rho, (2, 2))
    s_a, s_b, s_ab = marginal_entropies(rho)
    cc = s_a - bloch_grid_conditional_entropy(rho, n_theta, n_phi)
    return s_a + s_b - s_ab - cc, cc


def clamp_nonnegative(name: str, value: float, tol: float = 1e-9) -> float:
    if value < -tol:
        warnings.warn(f"{name} = {value:.3e} is negative beyond tolerance; clamped to 0", RuntimeWarning, stacklevel=2)
    return max(0.0, value)

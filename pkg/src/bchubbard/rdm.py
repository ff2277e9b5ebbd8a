"""Closed-form reduced density matrices of the ground state.

Local site basis is ``{|0>, |1>, |2>}`` (empty, singly occupied, doubly
occupied). Momentum modes use ``{|0>, |up>, |dn>, |updn>}``. Two-factor
matrices are always stored in the product basis with the first factor
varying slowest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import comb

from ._validation import (
    DomainError,
    check_densities,
    check_positive_int,
    check_square,
    check_unit_interval,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-12

SITE_BASIS = "site:{0,1,2}"
SITE_PAIR_BASIS = "site-pair:{00,01,02,10,11,12,20,21,22}"
MODE_BASIS = "mode:{0,up,dn,updn}"
MODE_PAIR_BASIS = "mode-pair:{0,up,dn,updn}^2"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on a tensor product.

    Parameters
    ----------
    data : array-like of shape (D, D)
        Matrix entries in the product basis described by ``basis_tag``.
    dims : tuple of int
        Local dimensions of the tensor factors; their product must equal D.
    basis_tag : str
        Free-form label for the basis ordering convention.
    """

    data: np.ndarray
    dims: tuple[int, ...]
    basis_tag: str = ""
    eigenvalues: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        data = np.array(check_square(self.data), dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        if math.prod(dims) != data.shape[0]:
            raise DomainError(f"dims {dims} do not match matrix size {data.shape[0]}")
        if np.max(np.abs(data - data.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise DomainError("density matrix is not Hermitian")
        data = 0.5 * (data + data.conj().T)
        if abs(np.trace(data).real - 1.0) > TRACE_TOL:
            raise DomainError(f"density matrix has trace {np.trace(data).real!r}")
        w = np.linalg.eigvalsh(data)
        if w[0] < -EIGEN_TOL:
            raise DomainError(f"density matrix has negative eigenvalue {w[0]!r}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "eigenvalues", np.clip(w, 0.0, None))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    def partial_trace(self, keep: int) -> "DensityMatrix":
        """Reduce a bipartite matrix to factor ``keep`` (0 or 1)."""
        if not self.is_bipartite:
            raise DomainError("partial_trace needs a bipartite matrix")
        out = partial_trace(self.data, self.dims, keep)
        return DensityMatrix(out, (self.dims[keep],), f"{self.basis_tag}|factor{keep}")


def partial_trace(data: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    d_a, d_b = dims
    t = np.asarray(data).reshape(d_a, d_b, d_a, d_b)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    if keep == 1:
        return np.einsum("ijil->jl", t)
    raise DomainError(f"keep must be 0 or 1, got {keep}")


def as_density_matrix(rho, dims=None) -> DensityMatrix:
    """Wrap a raw array; square matrices of size d*d default to dims ``(d, d)``."""
    if isinstance(rho, DensityMatrix):
        return rho
    arr = check_square(rho)
    if dims is None:
        d = math.isqrt(arr.shape[0])
        dims = (d, d) if d * d == arr.shape[0] else (arr.shape[0],)
    return DensityMatrix(arr, tuple(dims))


# -- direct lattice ---------------------------------------------------------


def gamma(n_s: float, r: int) -> float:
    """Single-fermion correlator ``sin(pi n_s r) / (pi r)`` at separation ``r``."""
    check_unit_interval("n_s", n_s, tol=1e-12)
    r = check_positive_int("r", r)
    return math.sin(math.pi * n_s * r) / (math.pi * r)


@dataclass(frozen=True)
class TwoSiteParams:
    """Parameters of the two-site matrix; build with :meth:`from_densities`."""

    n_s: float
    n_d: float
    r: int
    gamma: float

    def __post_init__(self):
        check_densities(self.n_s, self.n_d)
        check_positive_int("r", self.r)
        if self.pair_weight < -1e-12:
            raise DomainError("(1 - n_s)^2 - gamma^2 must be nonnegative")

    @classmethod
    def from_densities(cls, n_s: float, n_d: float, r: int, gamma_value: float | None = None):
        n_s, n_d = check_densities(n_s, n_d)
        g = gamma(n_s, r) if gamma_value is None else float(gamma_value)
        return cls(n_s=n_s, n_d=n_d, r=int(r), gamma=g)

    @property
    def c(self) -> float:
        # n_s = 1 forces n_d = 0, so the ratio is set to 0 there.
        return 0.0 if self.n_s >= 1.0 else self.n_d / (1.0 - self.n_s)

    @property
    def pair_weight(self) -> float:
        return (1.0 - self.n_s) ** 2 - self.gamma**2


def one_site_rdm(n_s: float, n_d: float) -> DensityMatrix:
    n_s, n_d = check_densities(n_s, n_d)
    return DensityMatrix(np.diag([1.0 - n_s - n_d, n_s, n_d]), (3,), SITE_BASIS)


def two_site_rdm(params: TwoSiteParams) -> DensityMatrix:
    """The 9x9 two-site reduced density matrix in the ``{00, 01, ..., 22}`` basis."""
    n_s, g, c = params.n_s, params.gamma, params.c
    p = max(params.pair_weight, 0.0)
    d1 = p * (1 - c) ** 2
    d2 = n_s**2 - g**2
    d3 = c**2 * p
    o1 = (1 - n_s - p) * (1 - c)
    o2 = g * (1 - c)
    p1 = c * (1 - n_s - p)
    p2 = c * g
    q = c * (1 - c) * p
    diag = np.array([d1, o1, q, o1, d2, p1, q, p1, d3])
    if diag.min() < -1e-12:
        raise DomainError(f"inconsistent two-site parameters {params}")
    rho = np.diag(np.clip(diag, 0.0, None)).astype(complex)
    rho[1, 3] = rho[3, 1] = o2
    rho[2, 6] = rho[6, 2] = q
    rho[5, 7] = rho[7, 5] = p2
    return DensityMatrix(rho, (3, 3), SITE_PAIR_BASIS)


def populated_levels(n_s: float, n_d: float, tol: float = 1e-15) -> tuple[int, ...]:
    """Local levels with nonzero weight, in increasing order."""
    n_s, n_d = check_densities(n_s, n_d)
    weights = (1.0 - n_s - n_d, n_s, n_d)
    return tuple(k for k, w in enumerate(weights) if w > tol)


def qubit_block(rho: DensityMatrix, levels: tuple[int, int]) -> DensityMatrix:
    """Restrict a two-qutrit matrix to the two-level subspace ``levels`` on each site.

    The weight outside the block must vanish; the block is then a genuine
    two-qubit state with ``levels[0] -> |0>`` and ``levels[1] -> |1>``.
    """
    if rho.dims != (3, 3):
        raise DomainError("qubit_block expects a two-qutrit matrix")
    lo, hi = levels
    idx = [3 * lo + lo, 3 * lo + hi, 3 * hi + lo, 3 * hi + hi]
    block = rho.data[np.ix_(idx, idx)]
    outside = 1.0 - np.trace(block).real
    if abs(outside) > 1e-12:
        raise DomainError(f"levels {levels} carry only weight {1 - outside:.3g}")
    return DensityMatrix(block, (2, 2), f"qubit-pair:levels{lo}{hi}")


# -- reciprocal lattice -----------------------------------------------------


def mode_params(n_s: float, n_d: float) -> tuple[float, float]:
    """Mode amplitudes ``(a, b)`` with ``a + b = 1``; ``b`` is the pair weight."""
    n_s, n_d = check_densities(n_s, n_d)
    if n_s >= 1.0:
        return 1.0, 0.0
    b = n_d / (1.0 - n_s)
    return 1.0 - b, b


def mode_rdm(a: float) -> DensityMatrix:
    a = check_unit_interval("a", a)
    b = 1.0 - a
    return DensityMatrix(np.diag([a * a, a * b, a * b, b * b]), (4,), MODE_BASIS)


#: Product-basis indices of |0,0>, |up,dn>, |dn,up>, |updn,updn> for a (k, -k) pair.
PAIRED_MODE_INDICES = (0, 4 * 1 + 2, 4 * 2 + 1, 15)


def two_mode_rdm(a: float, paired: bool) -> DensityMatrix:
    a = check_unit_interval("a", a)
    b = 1.0 - a
    if not paired:
        single = np.diag([a * a, a * b, a * b, b * b])
        return DensityMatrix(np.kron(single, single), (4, 4), MODE_PAIR_BASIS)
    block = np.array(
        [
            [a * a, 0, 0, 0],
            [0, a * b, a * b, 0],
            [0, a * b, a * b, 0],
            [0, 0, 0, b * b],
        ]
    )
    rho = np.zeros((16, 16))
    rho[np.ix_(PAIRED_MODE_INDICES, PAIRED_MODE_INDICES)] = block
    return DensityMatrix(rho, (4, 4), MODE_PAIR_BASIS + ":paired")


# -- finite eta-pair chains -------------------------------------------------


def _check_eta(L, N_d) -> tuple[int, int]:
    L = check_positive_int("L", L, minimum=2)
    N_d = check_positive_int("N_d", N_d, minimum=0)
    if N_d > L:
        raise DomainError(f"N_d={N_d} exceeds L={L}")
    return L, N_d


def _binom(n: int, k: int) -> int:
    return int(comb(n, k, exact=True)) if 0 <= k <= n else 0


def eta_pair_two_site_rdm(L: int, N_d: int) -> DensityMatrix:
    """Two-site marginal of the symmetric state with ``N_d`` pairs on ``L`` sites.

    Qubit picture: ``|0>`` empty, ``|1>`` doubly occupied.
    """
    L, N_d = _check_eta(L, N_d)
    total = _binom(L, N_d)
    p00 = _binom(L - 2, N_d) / total
    p01 = _binom(L - 2, N_d - 1) / total
    p11 = _binom(L - 2, N_d - 2) / total
    rho = np.array(
        [
            [p00, 0, 0, 0],
            [0, p01, p01, 0],
            [0, p01, p01, 0],
            [0, 0, 0, p11],
        ]
    )
    return DensityMatrix(rho, (2, 2), "eta-pair:{0,2}^2")


def eta_pair_one_site_rdm(L: int, N_d: int) -> DensityMatrix:
    L, N_d = _check_eta(L, N_d)
    x = N_d / L
    return DensityMatrix(np.diag([1.0 - x, x]), (2,), "eta:{0,2}")


def dicke_state_vector(L: int, N_d: int) -> np.ndarray:
    """Normalised equal superposition of all placements of ``N_d`` pairs (qubit ordering: site 0 slowest)."""
    L, N_d = _check_eta(L, N_d)
    psi = np.zeros(2**L)
    for occupied in combinations(range(L), N_d):
        psi[sum(1 << (L - 1 - k) for k in occupied)] = 1.0
    return psi / np.linalg.norm(psi)


def reduced_state(psi: np.ndarray, L: int, sites: tuple[int, ...]) -> np.ndarray:
    """Brute-force reduced density matrix of a pure ``L``-qubit state on ``sites``."""
    t = np.asarray(psi).reshape((2,) * L)
    rest = [k for k in range(L) if k not in sites]
    t = np.transpose(t, list(sites) + rest).reshape(2 ** len(sites), -1)
    return t @ t.conj().T

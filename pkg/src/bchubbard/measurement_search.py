"""Numerical discord for two-qutrit states.

The conditional entropy is minimised over von Neumann measurements on the
second site. Candidate bases come from Haar-random unitaries (or uniformly
drawn angle/phase parameters); the best few are polished by a Nelder-Mead
simplex in a six-parameter description of 3x3 unitaries modulo column phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._validation import DomainError, check_positive_int
from .correlations import clamp_nonnegative, conditional_entropy_vectors, marginal_entropies
from .rdm import DensityMatrix, as_density_matrix

ENGINES = ("haar", "bronzan")


@dataclass(frozen=True)
class SearchConfig:
    """Settings for :func:`minimize_conditional_entropy`.

    Attributes
    ----------
    n_samples : int
        Number of random candidate bases.
    n_refine : int
        Number of best candidates polished by the simplex.
    tol : float
        Convergence tolerance on the conditional entropy (bits).
    seed : int
        Root seed; combined with a stream index to give reproducible draws.
    max_iter : int
        Simplex iterations per polishing round.
    max_rounds : int
        Polishing rounds per candidate; a round restarts the simplex at the
        previous optimum and the loop stops once a round gains less than ``tol``.
    """

    n_samples: int = 20000
    n_refine: int = 3
    tol: float = 1e-9
    seed: int = 0
    max_iter: int = 500
    max_rounds: int = 40

    def __post_init__(self):
        check_positive_int("n_samples", self.n_samples)
        check_positive_int("n_refine", self.n_refine, minimum=0)
        check_positive_int("max_iter", self.max_iter)
        check_positive_int("max_rounds", self.max_rounds)
        if not self.tol > 0:
            raise DomainError("tol must be positive")


def rng_stream(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, index)``; independent across indices."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def haar_random_unitary(dim: int, stream: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitary matrices from the QR decomposition of a Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so the distribution is
    exactly Haar. Returns shape ``(dim, dim)`` or ``(size, dim, dim)``.
    """
    check_positive_int("dim", dim, minimum=2)
    shape = (1 if size is None else size, dim, dim)
    # one draw for real and imaginary parts keeps smaller batches a prefix of larger ones
    g = stream.standard_normal(shape + (2,))
    z = (g[..., 0] + 1j * g[..., 1]) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (d / np.abs(d))[..., None, :]
    return q[0] if size is None else q


def bronzan_unitary(eta1, eta2, eta3, alpha, beta, gamma) -> np.ndarray:
    """3x3 unitary from three mixing angles and three relevant phases.

    ``V = diag(1, e^{i alpha}, e^{i beta}) R23(eta3) U13(eta2, gamma) R12(eta1)``.
    The two column phases left out of this form do not change the projectors
    ``V|k><k|V^dag``, so every von Neumann measurement is reached.
    """
    c1, s1 = math.cos(eta1), math.sin(eta1)
    c2, s2 = math.cos(eta2), math.sin(eta2)
    c3, s3 = math.cos(eta3), math.sin(eta3)
    e = complex(math.cos(gamma), math.sin(gamma))
    ec = e.conjugate()
    w = np.array(
        [
            [c1 * c2, s1 * c2, s2 * ec],
            [-s1 * c3 - c1 * s3 * s2 * e, c1 * c3 - s1 * s3 * s2 * e, s3 * c2],
            [s1 * s3 - c1 * c3 * s2 * e, -c1 * s3 - s1 * c3 * s2 * e, c3 * c2],
        ],
        dtype=complex,
    )
    left = np.array([1.0, complex(math.cos(alpha), math.sin(alpha)), complex(math.cos(beta), math.sin(beta))])
    return left[:, None] * w


def bronzan_parameters(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`bronzan_unitary` up to column phases.

    Returns ``(eta1, eta2, eta3, alpha, beta, gamma)`` such that the
    reconstructed unitary defines the same measurement as ``v``.
    """
    v = np.asarray(v, dtype=complex)
    v = v * np.exp(-1j * np.angle(v[0]))[None, :]
    s2 = min(abs(v[0, 2]), 1.0)
    eta2 = math.asin(s2)
    eta1 = math.atan2(abs(v[0, 1]), abs(v[0, 0]))
    eta3 = math.atan2(abs(v[1, 2]), abs(v[2, 2]))
    a_plus = float(np.angle(v[1, 2]))
    b_plus = float(np.angle(v[2, 2]))
    c1, s1, c3, s3 = math.cos(eta1), math.sin(eta1), math.cos(eta3), math.sin(eta3)
    if c1 * c3 > 1e-12:
        em = (v[1, 1] * np.exp(-1j * a_plus) + s1 * s3 * s2) / (c1 * c3)
        gamma = -float(np.angle(em))
    else:
        gamma = 0.0
    return np.array([eta1, eta2, eta3, a_plus - gamma, b_plus - gamma, gamma])


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Complete set of rank-1 orthogonal projectors on one factor.

    ``vectors`` holds the measurement vectors as columns; ``parameters`` is
    the six-number angle/phase record when available.
    """

    vectors: np.ndarray
    parameters: np.ndarray | None = None
    source: str = "unitary"

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DomainError("measurement vectors must form a square matrix")
        if np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0]))) > 1e-10:
            raise DomainError("measurement vectors are not orthonormal")
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_parameters(cls, params) -> "MeasurementBasis":
        params = np.asarray(params, dtype=float)
        return cls(bronzan_unitary(*params), params, "bronzan")

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def projectors(self) -> np.ndarray:
        v = self.vectors
        return np.einsum("ik,jk->kij", v, v.conj())


def conditional_entropy(rho, basis: MeasurementBasis) -> float:
    """``sum_k p_k S(rho_A|k)`` after measuring ``basis`` on the second factor."""
    rho = as_density_matrix(rho)
    if not rho.is_bipartite or rho.dims[1] != basis.dim:
        raise DomainError(f"basis of dimension {basis.dim} does not act on factor of {rho.dims}")
    return float(conditional_entropy_vectors(rho, basis.vectors[None])[0])


@dataclass(frozen=True, eq=False)
class SearchResult:
    """Outcome of a conditional-entropy minimisation (values in bits)."""

    min_value: float
    basis: MeasurementBasis | None
    Q: float
    C: float
    I: float  # noqa: E741
    converged: bool
    n_evaluations: int
    sampled_min: float = field(default=math.nan)


def refine_conditional_entropy(rho, x0, cfg: SearchConfig | None = None) -> tuple[float, np.ndarray, bool]:
    """Simplex polish of the six basis parameters starting at ``x0``.

    Returns ``(value, parameters, converged)``.
    """
    value, x, ok, _ = _polish(as_density_matrix(rho), np.asarray(x0, dtype=float), cfg or SearchConfig())
    return value, x, ok


def _polish(rho: DensityMatrix, x0: np.ndarray, cfg: SearchConfig) -> tuple[float, np.ndarray, bool, int]:
    def objective(x):
        return float(conditional_entropy_vectors(rho, bronzan_unitary(*x)[None])[0])

    x, best = np.asarray(x0, dtype=float), objective(x0)
    evals, converged = 1, False
    for _ in range(cfg.max_rounds):
        res = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={"maxiter": cfg.max_iter, "xatol": 1e-12, "fatol": cfg.tol * 1e-3},
        )
        evals += res.nfev
        gain = best - res.fun
        if res.fun < best:
            x, best = res.x, float(res.fun)
        if gain < cfg.tol and res.success:
            converged = True
            break
    return best, x, converged, evals


def _candidates(dim: int, cfg: SearchConfig, stream: np.random.Generator, engine: str) -> np.ndarray:
    if engine == "haar":
        return haar_random_unitary(dim, stream, size=cfg.n_samples)
    angles = stream.uniform(0.0, math.pi / 2.0, size=(cfg.n_samples, 3))
    phases = stream.uniform(0.0, 2.0 * math.pi, size=(cfg.n_samples, 3))
    params = np.hstack([angles, phases])
    return np.stack([bronzan_unitary(*p) for p in params])


def minimize_conditional_entropy(
    rho,
    cfg: SearchConfig | None = None,
    *,
    stream_index: int = 0,
    warm_start=None,
    engine: str = "haar",
) -> SearchResult:
    """Minimise the conditional entropy of factor A over von Neumann measurements on B.

    Parameters
    ----------
    rho : DensityMatrix or array-like
        Bipartite state; the measured factor must be three-dimensional.
    cfg : SearchConfig, optional
        Sampling and refinement settings.
    stream_index : int
        Index of the random stream, e.g. the scan-point number.
    warm_start : MeasurementBasis or array-like of 6 parameters, optional
        Extra starting point for the simplex, typically the optimum of the
        previous scan point.
    engine : {"haar", "bronzan"}
        Source of random candidates.

    Returns
    -------
    SearchResult
        The reported minimum is an upper bound on the true infimum.
    """
    cfg = cfg or SearchConfig()
    if engine not in ENGINES:
        raise DomainError(f"engine must be one of {ENGINES}, got {engine!r}")
    rho = as_density_matrix(rho)
    if not rho.is_bipartite or rho.dims[1] != 3:
        raise DomainError(f"expected a state with a three-level second factor, got dims {rho.dims}")
    s_a, s_b, s_ab = marginal_entropies(rho)
    mi = max(0.0, s_a + s_b - s_ab)
    if s_a < 1e-12 or s_b < 1e-12:
        return SearchResult(s_a, None, 0.0, 0.0, mi, True, 0, s_a)

    stream = rng_stream(cfg.seed, stream_index)
    unitaries = _candidates(3, cfg, stream, engine)
    values = conditional_entropy_vectors(rho, unitaries)
    order = np.argsort(values, kind="stable")
    best_value = float(values[order[0]])
    best_params = bronzan_parameters(unitaries[order[0]])
    evals, converged = cfg.n_samples, cfg.n_refine == 0 and warm_start is None

    starts = [bronzan_parameters(unitaries[k]) for k in order[: cfg.n_refine]]
    if warm_start is not None:
        if isinstance(warm_start, MeasurementBasis):
            warm = warm_start.parameters if warm_start.parameters is not None else bronzan_parameters(warm_start.vectors)
        else:
            warm = np.asarray(warm_start, dtype=float)
        starts.insert(0, warm)
    for x0 in starts:
        value, x, ok, n = _polish(rho, x0, cfg)
        evals += n
        if value <= best_value:
            best_value, best_params, converged = value, x, ok

    cc = s_a - best_value
    qd = mi - cc
    return SearchResult(
        min_value=best_value,
        basis=MeasurementBasis.from_parameters(best_params),
        Q=clamp_nonnegative("discord", qd),
        C=clamp_nonnegative("classical correlations", cc),
        I=mi,
        converged=converged,
        n_evaluations=evals,
        sampled_min=float(values[order[0]]),
    )

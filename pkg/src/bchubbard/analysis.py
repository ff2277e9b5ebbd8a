"""Parameter sweeps, derivatives, divergence and decay fits, monogamy ratios.

Every point record is produced by the method appropriate to its phase:
the analytic X-state formulas where only two local levels are populated,
the numerical qutrit search where all three are, and the closed forms of
the momentum-mode picture when ``kspace=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.stats import linregress

from ._validation import DomainError, check_densities, check_finite, check_positive_int
from .correlations import (
    CorrelationRecord,
    binary_entropy,
    concurrence,
    conditional_entropy_vectors,
    discord_cc_xstate,
    discord_kspace,
    discord_region3_closed_form,
    marginal_entropies,
    negativity,
    von_neumann_entropy,
)
from .measurement_search import (
    SearchConfig,
    SearchResult,
    conditional_entropy,
    MeasurementBasis,
    minimize_conditional_entropy,
    refine_conditional_entropy,
)
from .phase_model import (
    PhaseLabel,
    classify_filling,
    classify_phase,
    densities_at_filling,
    ground_state_densities,
)
from .rdm import (
    TwoSiteParams,
    eta_pair_one_site_rdm,
    eta_pair_two_site_rdm,
    mode_params,
    one_site_rdm,
    populated_levels,
    qubit_block,
    two_mode_rdm,
    two_site_rdm,
)

#: Distance a scan point must keep from any phase boundary.
REGION_MARGIN = 1e-6
#: Default critical window ``|lambda - lambda_c|`` for divergence fits.
CRITICAL_WINDOW = (1e-4, 1e-2)
MEASURES = ("I", "C", "Q")
AXES = ("mu", "u", "n", "n_d", "r", "L")
FIT_MODELS = ("algebraic", "logarithmic", "power_law")


# -- single-point records -------------------------------------------------------


def _qubit_record(block, s_single: float, method: str = "analytic_xstate") -> CorrelationRecord:
    q, c, _ = discord_cc_xstate(block)
    s_a, s_b, s_ab = marginal_entropies(block)
    mi = max(0.0, s_a + s_b - s_ab)
    return CorrelationRecord(
        I=mi,
        C=max(0.0, c),
        Q=max(0.0, q),
        K=concurrence(block),
        N=negativity(block),
        S_single=s_single,
        method=method,
    )


def pair_record(
    n_s: float,
    n_d: float,
    r: int = 1,
    *,
    gamma_value: float | None = None,
    cfg: SearchConfig | None = None,
    stream_index: int = 0,
    warm_start=None,
    basis: MeasurementBasis | None = None,
) -> tuple[CorrelationRecord, SearchResult | None]:
    """Correlations between two sites at distance ``r``.

    Parameters
    ----------
    n_s, n_d : float
        Ground-state densities.
    r : int
        Site separation.
    gamma_value : float, optional
        Override of the single-fermion correlator (``0`` gives the
        infinite-distance limit).
    cfg, stream_index, warm_start :
        Forwarded to :func:`minimize_conditional_entropy` when all three local
        levels are populated.
    basis : MeasurementBasis, optional
        Evaluate the three-level case in this fixed basis instead of optimising.

    Returns
    -------
    record : CorrelationRecord
    search : SearchResult or None
        Present only for the numerical qutrit path.
    """
    params = TwoSiteParams.from_densities(n_s, n_d, r, gamma_value)
    rho = two_site_rdm(params)
    s_single = von_neumann_entropy(one_site_rdm(params.n_s, params.n_d))
    levels = populated_levels(params.n_s, params.n_d)
    if len(levels) == 1:
        return CorrelationRecord(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, "analytic_xstate"), None
    if len(levels) == 2:
        return _qubit_record(qubit_block(rho, levels), s_single), None

    s_a, s_b, s_ab = marginal_entropies(rho)
    mi = max(0.0, s_a + s_b - s_ab)
    if basis is not None:
        value = conditional_entropy(rho, basis)
        search = SearchResult(value, basis, mi - (s_a - value), s_a - value, mi, True, 1, value)
    else:
        search = minimize_conditional_entropy(rho, cfg, stream_index=stream_index, warm_start=warm_start)
    record = CorrelationRecord(
        I=mi, C=search.C, Q=search.Q, K=math.nan, N=negativity(rho), S_single=s_single, method="numeric_qutrit"
    )
    return record, search


def region3_record(n_d: float) -> CorrelationRecord:
    """Site-pair record of the pure eta-pair phase (distance independent)."""
    record, _ = pair_record(0.0, n_d, 1, gamma_value=0.0)
    nd = n_d if n_d <= 0.5 else 1.0 - n_d
    q = discord_region3_closed_form(nd) if 0.0 < nd else 0.0
    return CorrelationRecord(record.I, record.C, q, record.K, record.N, record.S_single, "closed_form")


def kspace_record(n_s: float, n_d: float) -> CorrelationRecord:
    """Correlations of a ``(k, -k)`` mode pair."""
    a, _ = mode_params(n_s, n_d)
    rho = two_mode_rdm(a, paired=True)
    s_a, s_b, s_ab = marginal_entropies(rho)
    q = discord_kspace(a)
    mi = max(0.0, s_a + s_b - s_ab)
    return CorrelationRecord(
        I=mi, C=mi - q, Q=q, K=math.nan, N=negativity(rho), S_single=s_a, method="kspace"
    )


def eta_record(L: int, N_d: int) -> CorrelationRecord:
    """Two-site record of the finite symmetric eta-pair state."""
    rho = eta_pair_two_site_rdm(L, N_d)
    return _qubit_record(rho, von_neumann_entropy(eta_pair_one_site_rdm(L, N_d)))


# -- scans ----------------------------------------------------------------------


@dataclass(frozen=True)
class FitReport:
    """Least-squares fit of a divergence or decay law.

    ``exponent_or_slope`` is the exponent ``p`` of ``|lambda - lambda_c|^p`` or
    ``r^p``, or the coefficient ``a`` of ``a log|lambda - lambda_c| + b``.
    """

    model: str
    exponent_or_slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    n_points: int
    measure: str = ""

    def as_dict(self) -> dict:
        return {
            "measure": self.measure,
            "model": self.model,
            "exponent_or_slope": self.exponent_or_slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
            "n_points": self.n_points,
        }


@dataclass(eq=False)
class ScanResult:
    """Records along one parameter axis.

    Attributes
    ----------
    region : PhaseLabel or None
    axis : str
    values : ndarray
        Strictly increasing parameter values.
    records : list of CorrelationRecord
    r : int
    fixed : dict
        Parameters held constant.
    densities : ndarray of shape (n, 2)
        ``(n_s, n_d)`` at each point.
    derivatives : dict of str to ndarray
        Interior-point derivatives (length ``n - 2``), filled by
        :func:`numerical_derivative`.
    fits : list of FitReport
    bases : list
        Optimal basis parameters for numerically evaluated points.
    """

    region: PhaseLabel | None
    axis: str
    values: np.ndarray
    records: list
    r: int = 1
    fixed: dict = field(default_factory=dict)
    densities: np.ndarray | None = None
    derivatives: dict = field(default_factory=dict)
    fits: list = field(default_factory=list)
    bases: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) != len(self.records):
            raise DomainError("values and records must have the same length")
        if len(self.values) > 1 and not np.all(np.diff(self.values) > 0):
            raise DomainError("scan values must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(rec, name) for rec in self.records], dtype=float)


def _nudged(point: dict, axis: str, margin: float):
    # The margin is applied along the swept axis only; line phases (II on
    # mu = 0, IV at n = 1) have no width in the other direction.
    yield dict(point)
    if axis in point:
        for step in (-margin, margin):
            q = dict(point)
            q[axis] = point[axis] + step
            yield q


def _check_region_mu(region: PhaseLabel, u: float, mu: float, margin: float, axis: str = "mu") -> None:
    labels = {classify_phase(q["u"], q["mu"]) for q in _nudged({"u": u, "mu": mu}, axis, margin)}
    if labels != {region}:
        raise DomainError(f"point u={u}, mu={mu} is not inside region {region} (margin {margin})")


def _check_region_filling(region: PhaseLabel, u: float, n: float, margin: float, axis: str = "n") -> None:
    labels = {
        classify_filling(q["u"], q["n"]) for q in _nudged({"u": u, "n": n}, axis, margin) if 0.0 <= q["n"] <= 2.0
    }
    if labels != {region}:
        raise DomainError(f"point u={u}, n={n} is not inside region {region} (margin {margin})")


def point_densities(region: PhaseLabel, axis: str, value: float, fixed: dict, *, check: bool = True):
    """Densities ``(n_s, n_d)`` of one scan point.

    The point is given either by ``(u, mu)``, by ``(u, n)``, or for the pure
    pair phase by ``n_d`` alone. With ``check=True`` a
    :class:`DomainError` is raised unless the point lies inside ``region`` by
    at least :data:`REGION_MARGIN`.
    """
    region = PhaseLabel(region)
    p = dict(fixed)
    if axis in ("mu", "u", "n", "n_d"):
        p[axis] = float(value)
    if region is PhaseLabel.III and "n_d" in p and "u" not in p:
        n_d = p["n_d"]
        if check and not (REGION_MARGIN <= n_d <= 1.0 - REGION_MARGIN):
            raise DomainError(f"n_d={n_d} is not inside region III")
        return check_densities(0.0, n_d)
    if "mu" in p and "u" in p:
        check_finite(u=p["u"], mu=p["mu"])
        if check:
            _check_region_mu(region, p["u"], p["mu"], REGION_MARGIN, axis)
        return ground_state_densities(p["u"], p["mu"])
    if "n" in p and "u" in p:
        check_finite(u=p["u"], n=p["n"])
        if check:
            _check_region_filling(region, p["u"], p["n"], REGION_MARGIN, axis)
        return densities_at_filling(p["u"], p["n"])
    raise DomainError(f"cannot place a point of region {region} from axis {axis!r} and {sorted(fixed)}")


def scan(
    region,
    axis: str,
    values,
    *,
    fixed: dict | None = None,
    r: int = 1,
    kspace: bool = False,
    cfg: SearchConfig | None = None,
    allow_crossing: bool = False,
    warm_start: bool = True,
    basis: MeasurementBasis | None = None,
) -> ScanResult:
    """Evaluate pair correlations along one axis.

    Parameters
    ----------
    region : PhaseLabel or str
        Phase the whole range must lie in.
    axis : {"mu", "u", "n", "n_d", "r", "L"}
        Swept parameter. ``"L"`` sweeps finite eta-pair chains at fixed
        ``N_d`` (or fixed ``n_d``, rounded to the nearest pair number).
    values : array-like
        Strictly increasing parameter values.
    fixed : dict
        The remaining parameters, e.g. ``{"u": 4.0}`` or ``{"n": 1.0}``.
    r : int
        Site separation (ignored for ``axis="r"``).
    kspace : bool
        Use the ``(k, -k)`` mode pair instead of a site pair.
    cfg : SearchConfig, optional
        Settings for three-level points.
    allow_crossing : bool
        Accept points outside ``region``; each record then uses the method of
        the phase it actually lies in.
    warm_start : bool
        Seed each numerical optimisation with the previous optimum and run a
        backward polishing pass.
    basis : MeasurementBasis, optional
        Fixed measurement for three-level points (no optimisation).
    """
    if axis not in AXES:
        raise DomainError(f"axis must be one of {AXES}, got {axis!r}")
    region = PhaseLabel(region)
    fixed = dict(fixed or {})
    cfg = cfg or SearchConfig()
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or len(vals) == 0:
        raise DomainError("scan needs a one-dimensional, non-empty range")
    if len(vals) > 1 and not np.all(np.diff(vals) > 0):
        raise DomainError("scan values must be strictly increasing")

    if axis == "L":
        return _scan_eta(vals, fixed)

    records, densities, searches = [], [], []
    if axis == "r":
        ns_nd = point_densities(region, "r", 0.0, fixed, check=not allow_crossing)
        for k, rv in enumerate(vals):
            if rv != int(rv):
                raise DomainError("r values must be integers")
            densities.append(ns_nd)
        pts = [(int(rv), ns_nd) for rv in vals]
    else:
        pts = []
        for v in vals:
            ns_nd = point_densities(region, axis, v, fixed, check=not allow_crossing)
            densities.append(ns_nd)
            pts.append((r, ns_nd))

    previous = None
    for k, (rk, (n_s, n_d)) in enumerate(pts):
        if kspace:
            rec, search = kspace_record(n_s, n_d), None
        else:
            rec, search = pair_record(
                n_s, n_d, rk, cfg=cfg, stream_index=k, warm_start=previous if warm_start else None, basis=basis
            )
        if search is not None and search.basis is not None:
            previous = search.basis.parameters
        records.append(rec)
        searches.append(search)

    if warm_start and basis is None and not kspace:
        _backward_pass(pts, records, searches, cfg)

    bases = [None if s is None or s.basis is None else s.basis.parameters for s in searches]
    return ScanResult(region, axis, vals, records, r, fixed, np.array(densities, dtype=float), bases=bases)


def _backward_pass(pts, records, searches, cfg: SearchConfig) -> None:
    # Re-polish each numerical point from its right neighbour's optimum; keep improvements.
    for k in range(len(pts) - 2, -1, -1):
        s, nxt = searches[k], searches[k + 1]
        if s is None or s.basis is None or nxt is None or nxt.basis is None:
            continue
        rk, (n_s, n_d) = pts[k]
        rho = two_site_rdm(TwoSiteParams.from_densities(n_s, n_d, rk))
        value, x, ok = refine_conditional_entropy(rho, nxt.basis.parameters, cfg)
        if value < s.min_value - 1e-15:
            s_a, s_b, s_ab = marginal_entropies(rho)
            mi = max(0.0, s_a + s_b - s_ab)
            cc = max(0.0, s_a - value)
            new = SearchResult(value, MeasurementBasis.from_parameters(x), max(0.0, mi - cc), cc, mi, ok,
                               s.n_evaluations, s.sampled_min)
            searches[k] = new
            old = records[k]
            records[k] = CorrelationRecord(old.I, new.C, new.Q, old.K, old.N, old.S_single, old.method)


def _scan_eta(vals: np.ndarray, fixed: dict) -> ScanResult:
    records, densities = [], []
    for v in vals:
        L = int(v)
        if L != v:
            raise DomainError("L values must be integers")
        if "N_d" in fixed:
            N_d = int(fixed["N_d"])
        elif "n_d" in fixed:
            N_d = int(round(fixed["n_d"] * L))
        else:
            raise DomainError("an L sweep needs N_d or n_d in the fixed parameters")
        records.append(eta_record(L, N_d))
        densities.append((0.0, N_d / L))
    return ScanResult(PhaseLabel.III, "L", vals, records, 1, fixed, np.array(densities))


# -- derivatives and fits --------------------------------------------------------


def central_difference(x, y, richardson: bool = False) -> np.ndarray:
    """Derivative of ``y(x)`` at the interior points ``x[1:-1]``.

    Uses the second-order three-point formula on non-uniform grids. With
    ``richardson=True`` and a uniform grid, points that have two neighbours on
    each side get one Richardson step combining spacings ``h`` and ``2h``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3:
        raise DomainError("a derivative needs at least 3 points")
    d = np.gradient(y, x)[1:-1]
    if richardson:
        h = np.diff(x)
        if not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
            raise DomainError("Richardson extrapolation needs a uniform grid")
        if len(x) >= 5:
            wide = (y[4:] - y[:-4]) / (4.0 * h[0])
            d = d.copy()
            d[1:-1] = (4.0 * d[1:-1] - wide) / 3.0
    return d


def numerical_derivative(result: ScanResult, richardson: bool = False, measures=MEASURES) -> ScanResult:
    """Fill ``result.derivatives`` with central differences of each measure."""
    if len(result) < 3:
        raise DomainError("a derivative needs at least 3 points")
    for m in measures:
        result.derivatives[m] = central_difference(result.values, result.column(m), richardson)
    return result


def fit_divergence(
    params,
    derivatives,
    lambda_c: float,
    model: str,
    window: tuple[float, float] = CRITICAL_WINDOW,
    measure: str = "",
) -> FitReport:
    """Fit a divergence law to derivative samples.

    Parameters
    ----------
    params, derivatives : array-like
        Parameter values and derivative samples.
    lambda_c : float
        Critical point.
    model : {"algebraic", "logarithmic"}
        ``|d| ~ |lambda - lambda_c|^p`` (fit in log-log) or
        ``d = a log|lambda - lambda_c| + b``.
    window : (float, float)
        Range of ``|lambda - lambda_c|`` used in the fit.
    """
    if model not in ("algebraic", "logarithmic"):
        raise DomainError(f"model must be 'algebraic' or 'logarithmic', got {model!r}")
    x = np.asarray(params, dtype=float)
    y = np.asarray(derivatives, dtype=float)
    if x.shape != y.shape:
        raise DomainError("params and derivatives differ in shape")
    dist = np.abs(x - lambda_c)
    lo, hi = window
    if dist.size == 0 or dist.min() > lo * (1 + 1e-9) or dist.max() < hi * (1 - 1e-9):
        raise DomainError(f"window {window} is not covered by the scan")
    mask = (dist >= lo * (1 - 1e-9)) & (dist <= hi * (1 + 1e-9)) & np.isfinite(y)
    if model == "algebraic":
        mask &= y != 0.0
    if mask.sum() < 10:
        raise DomainError(f"only {int(mask.sum())} points in window {window}; need 10")
    lx = np.log(dist[mask])
    ly = np.log(np.abs(y[mask])) if model == "algebraic" else y[mask]
    fit = linregress(lx, ly)
    return FitReport(model, float(fit.slope), float(fit.intercept), float(fit.rvalue**2), (lo, hi),
                     int(mask.sum()), measure)


def fit_power_law(r, values, measure: str = "") -> FitReport:
    """Log-log least squares of ``values ~ r^p``."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(r) < 2:
        raise DomainError("a power-law fit needs at least 2 points")
    fit = linregress(np.log(r), np.log(v))
    r2 = float(fit.rvalue**2) if np.ptp(np.log(v)) > 0 else 1.0
    return FitReport("power_law", float(fit.slope), float(fit.intercept), r2, (float(r.min()), float(r.max())),
                     len(r), measure)


def critical_fits(result: ScanResult, lambda_c: float, window=CRITICAL_WINDOW) -> list[FitReport]:
    """Algebraic and logarithmic fits of each stored derivative; appended to ``result.fits``."""
    if not result.derivatives:
        numerical_derivative(result)
    x = result.values[1:-1]
    out = []
    for m, d in result.derivatives.items():
        for model in ("algebraic", "logarithmic"):
            out.append(fit_divergence(x, d, lambda_c, model, window, measure=m))
    result.fits.extend(out)
    return out


def approach_grid(lambda_c: float, side: int, lo: float = 10**-4.3, hi: float = 10**-1.7, num: int = 30):
    """Increasing grid of points at log-spaced distances from ``lambda_c``.

    ``side=-1`` approaches from below, ``side=+1`` from above.
    """
    d = np.logspace(math.log10(lo), math.log10(hi), num)
    pts = lambda_c - d if side < 0 else lambda_c + d
    return np.sort(pts)


# -- decay laws -------------------------------------------------------------------


def local_maxima(values) -> np.ndarray:
    """Indices ``k`` (interior) with ``v[k-1] <= v[k] >= v[k+1]``."""
    v = np.asarray(values, dtype=float)
    k = np.arange(1, len(v) - 1)
    return k[(v[k] >= v[k - 1]) & (v[k] >= v[k + 1])]


def decay_envelope(region, fixed: dict, r_max: int, r_min: int = 4, measures=MEASURES) -> dict:
    """Power-law fit of the envelope of each measure over the distance.

    Local maxima of the sequence over ``r = 1 .. r_max + 1`` with
    ``r_min <= r <= r_max`` are fitted by ``r^p``.

    Returns
    -------
    dict of str to FitReport
    """
    r_max = check_positive_int("r_max", r_max, minimum=16)
    rs = np.arange(1, r_max + 2)
    result = scan(region, "r", rs, fixed=fixed)
    out = {}
    for m in measures:
        v = result.column(m)
        if np.ptp(v) <= 1e-14:
            keep = np.arange(len(rs))
        else:
            keep = local_maxima(v)
        keep = keep[(rs[keep] >= r_min) & (rs[keep] <= r_max) & (v[keep] > 0)]
        if len(keep) < 4:
            raise DomainError(f"only {len(keep)} maxima of {m} in [{r_min}, {r_max}]")
        out[m] = fit_power_law(rs[keep], v[keep], measure=m)
    return out


@dataclass(frozen=True)
class MaximaRow:
    r: int
    n_s_star: float
    Q_max: float
    C_max: float
    I_max: float
    n_s_star_C: float
    n_s_star_I: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _region1_value(n_s: float, r: int, measure: str) -> float:
    rec, _ = pair_record(n_s, 0.0, r)
    return getattr(rec, measure)


def maxima_scaling(r_list, xtol: float = 1e-6) -> list[MaximaRow]:
    """Position and height of the last maximum of I, Q, C over ``n_s`` at fixed ``r``.

    The search runs over the lobe ``n_s in [1 - 1/r, 1]`` between the last
    two nodes, using a bounded scalar minimiser with tolerance ``xtol``.
    """
    rows = []
    for r in r_list:
        r = check_positive_int("r", int(r), minimum=4)
        lo, hi = 1.0 - 1.0 / r, 1.0
        best = {}
        for m in MEASURES:
            res = minimize_scalar(lambda x: -_region1_value(x, r, m), bounds=(lo, hi), method="bounded",
                                  options={"xatol": xtol})
            best[m] = (float(res.x), -float(res.fun))
        rows.append(MaximaRow(r, best["Q"][0], best["Q"][1], best["C"][1], best["I"][1], best["C"][0], best["I"][0]))
    return rows


# -- finite / infinite range split -----------------------------------------------


@dataclass(frozen=True)
class RangeDecomposition:
    """``A(r) = A_finite(r) + A_inf`` for each measure of a three-level point."""

    n_s: float
    n_d: float
    r: np.ndarray
    infinite: dict
    finite: dict
    total: dict


def limit_conditional_entropy(n_s: float, n_d: float) -> float:
    """Minimal conditional entropy of the infinite-distance state.

    The limit state is block diagonal on the measured site: level ``1``
    carries no coherence, so the optimal measurement keeps ``|1>`` and rotates
    in the ``{|0>, |2>}`` plane. Only the real rotation angle matters because
    the single coherence is real.
    """
    rho = two_site_rdm(TwoSiteParams.from_densities(n_s, n_d, 1, gamma_value=0.0))

    def h(theta):
        c, s = math.cos(theta), math.sin(theta)
        v = np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]], dtype=complex)
        return float(conditional_entropy_vectors(rho, v[None])[0])

    grid = np.linspace(0.0, math.pi / 2, 181)
    vals = [h(t) for t in grid]
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(h, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    return min(float(res.fun), vals[k])


def range_decomposition(n_s: float, n_d: float, r_values, cfg: SearchConfig | None = None) -> RangeDecomposition:
    """Split I, C, Q at each distance into a finite-range part and the ``r -> inf`` limit."""
    inf_rec, _ = pair_record(n_s, n_d, 1, gamma_value=0.0, cfg=cfg)
    infinite = {m: getattr(inf_rec, m) for m in MEASURES}
    rs = np.array([check_positive_int("r", int(r)) for r in r_values])
    total = {m: [] for m in MEASURES}
    for k, r in enumerate(rs):
        rec, _ = pair_record(n_s, n_d, int(r), cfg=cfg, stream_index=k)
        for m in MEASURES:
            total[m].append(getattr(rec, m))
    total = {m: np.array(v) for m, v in total.items()}
    finite = {m: total[m] - infinite[m] for m in MEASURES}
    return RangeDecomposition(n_s, n_d, rs, infinite, finite, total)


# -- monogamy -------------------------------------------------------------------


@dataclass(frozen=True)
class MonogamyReport:
    """One-vs-rest discord against the sum of pairwise discords (bits).

    For infinite chains ``Q2_sum`` is the truncated sum and ``R_lower`` /
    ``R_upper`` bracket the ratio using the tail bound.
    """

    family: str
    L: int | None
    N_d: int | None
    mu: float | None
    u: float | None
    Q1: float
    Q2_sum: float
    R: float
    violated: bool
    R_lower: float = math.nan
    R_upper: float = math.nan
    tail_bound: float = 0.0
    K1_squared: float = math.nan
    K2_squared_sum: float = math.nan

    def __post_init__(self):
        if self.Q1 < 0 or self.Q2_sum < 0 or self.R < 0:
            raise DomainError("monogamy quantities must be nonnegative")

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _ratio(q1: float, q2: float) -> float:
    return math.inf if q2 == 0.0 else q1 / q2


def monogamy_eta(L: int, N_d: int) -> MonogamyReport:
    """Discord monogamy of the symmetric eta-pair state with ``N_d`` pairs on ``L`` sites.

    Also reports the squared-concurrence balance ``K1^2`` (one site against
    the rest, ``4 det rho_1`` for a pure global state) against
    ``(L - 1) K_12^2``.
    """
    L = check_positive_int("L", L, minimum=3)
    N_d = check_positive_int("N_d", N_d, minimum=1)
    if N_d > L - 1:
        raise DomainError(f"N_d must lie in [1, L-1], got {N_d} for L={L}")
    x = N_d / L
    q1 = binary_entropy(x)
    rho = eta_pair_two_site_rdm(L, N_d)
    q2, _, _ = discord_cc_xstate(rho)
    q2_sum = (L - 1) * max(0.0, q2)
    R = _ratio(q1, q2_sum)
    return MonogamyReport(
        "eta", L, N_d, None, None, q1, q2_sum, R, R < 1,
        K1_squared=4.0 * x * (1.0 - x),
        K2_squared_sum=(L - 1) * concurrence(rho) ** 2,
    )


def region1_discords(n_s: float, r_max: int) -> np.ndarray:
    """``Q(r)`` for ``r = 1 .. r_max`` at ``n_d = 0``."""
    return np.array([pair_record(n_s, 0.0, r)[0].Q for r in range(1, r_max + 1)])


def _region1_report(mu: float, u: float, r_max: int) -> MonogamyReport:
    n_s, _ = ground_state_densities(u, mu)
    q = region1_discords(n_s, r_max)
    r = np.arange(1, r_max + 1)
    half = r >= r_max // 2
    tail = float(np.max(q[half] * r[half] ** 2)) / r_max
    q1, q2 = binary_entropy(n_s), float(q.sum())
    R_upper, R_lower = _ratio(q1, q2), _ratio(q1, q2 + tail)
    return MonogamyReport("region1", None, None, float(mu), float(u), q1, q2, R_upper, R_upper < 1,
                          R_lower=R_lower, R_upper=R_upper, tail_bound=tail)


def monogamy_region1(mu: float, u: float = 4.0, r_max: int = 2000) -> MonogamyReport:
    """Discord monogamy of one site against the half chain on its right in region I.

    ``Q2_sum`` adds ``Q(r)`` for ``r <= r_max``. The remainder is bounded by
    ``B / r_max`` where ``B`` is the largest ``Q(r) r^2`` over the upper half
    of the summed range, i.e. a conservative ``r^-2`` envelope coefficient.
    ``R_upper`` uses the truncated sum, ``R_lower`` adds the tail bound; a
    :class:`RuntimeError` signals that the two disagree on the verdict.
    """
    r_max = check_positive_int("r_max", r_max, minimum=100)
    check_finite(u=u, mu=mu)
    _check_region_mu(PhaseLabel.I, u, mu, REGION_MARGIN, "mu")
    report = _region1_report(mu, u, r_max)
    if (report.R_upper < 1) != (report.R_lower < 1):
        raise RuntimeError(
            f"tail bound leaves the verdict undecided at mu={mu}: R in [{report.R_lower}, {report.R_upper}]"
        )
    return report


def monogamy_crossover(u: float = 4.0, bracket=(-0.5, -0.05), r_max: int = 2000, xtol: float = 1e-4):
    """Chemical potentials where ``R_upper`` and ``R_lower`` cross 1 in region I."""
    a, b = bracket
    for mu in bracket:
        _check_region_mu(PhaseLabel.I, u, mu, REGION_MARGIN)

    def f(which):
        return lambda mu: getattr(_region1_report(mu, u, r_max), which) - 1.0

    return brentq(f("R_upper"), a, b, xtol=xtol), brentq(f("R_lower"), a, b, xtol=xtol)

"""Command-line interface: ``bchubbard {phase,scan,kspace,monogamy,verify}``.

Every subcommand accepts ``--seed``, ``--samples``, ``--format``, ``--out``
and ``--config``. A config file is a JSON object whose keys are option names
(dashes or underscores); explicit flags override it.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from ._validation import DomainError
from .analysis import (
    FitReport,
    approach_grid,
    critical_fits,
    monogamy_eta,
    monogamy_region1,
    numerical_derivative,
    scan,
)
from .measurement_search import SearchConfig
from .phase_model import PhaseLabel, energy_density, model_point
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

REGIONS = [p.value for p in PhaseLabel]

MEASURE_COLUMNS = {
    "I": "mutual_information",
    "C": "classical_correlation",
    "Q": "discord",
    "K": "concurrence",
    "N": "negativity",
    "S_single": "single_site_entropy",
}


class UsageError(Exception):
    pass


# -- output ---------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "" if value is None else str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if not math.isfinite(value) else float(value)
    return value


def render_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(payload: dict) -> str:
    def convert(obj):
        if isinstance(obj, dict):
            return {k: convert(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [convert(v) for v in obj]
        return _json_value(obj)

    return json.dumps(convert(payload), indent=2, sort_keys=False) + "\n"


def emit(args, command: str, columns: list[str], rows: list[dict], extra: dict | None = None) -> None:
    """Write a table (plus optional extra blocks) in the requested format."""
    extra = extra or {}
    if args.format == "json":
        payload = {"command": command, "columns": columns, "rows": rows}
        payload.update(extra)
        _write(args.out, render_json(payload))
        return
    _write(args.out, render_csv(columns, rows))
    for name, block in extra.items():
        if not block:
            continue
        cols = list(block[0].keys())
        text = render_csv(cols, block)
        if args.out:
            out = Path(args.out)
            _write(str(out.with_name(f"{out.stem}.{name}{out.suffix or '.csv'}")), text)
        else:
            sys.stderr.write(text)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# -- parser ---------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="root seed of the random measurement search")
    g.add_argument("--samples", type=int, default=20000, help="random candidate bases per qutrit point")
    g.add_argument("--n-refine", type=int, default=3, help="best candidates polished by the simplex")
    g.add_argument("--tol", type=float, default=1e-9, help="simplex convergence tolerance (bits)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out", default=None, help="output file (default: stdout)")
    g.add_argument("--config", default=None, help="JSON file with option values; flags take precedence")
    return p


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), help="linear grid on the axis")
    p.add_argument("--points", type=int, default=41, help="number of grid points")
    p.add_argument("--approach", nargs=2, type=float, metavar=("LAMBDA_C", "SIDE"),
                   help="log-spaced distances 10^-4.3..10^-1.7 from LAMBDA_C on side -1 or +1")
    p.add_argument("--u", type=float, default=None, help="fixed interaction")
    p.add_argument("--mu", type=float, default=None, help="fixed chemical potential")
    p.add_argument("--n", type=float, default=None, help="fixed filling")
    p.add_argument("--n-d", type=float, default=None, help="fixed pair density (pure pair phase)")
    p.add_argument("--allow-crossing", action="store_true", help="accept points outside the region")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="bchubbard",
        description="Phase diagram and pairwise correlations of the bond-charge Hubbard chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("phase", parents=[common], help="phase diagram table")
    p.add_argument("--u-range", nargs=2, type=float, default=[-6.0, 6.0], metavar=("LO", "HI"))
    p.add_argument("--mu-range", nargs=2, type=float, default=[-4.0, 4.0], metavar=("LO", "HI"))
    p.add_argument("--grid", nargs="+", type=int, default=[41], metavar="N",
                   help="points per axis (one value for both, or N_U N_MU)")
    subs["phase"] = p

    p = sub.add_parser("scan", parents=[common], help="site-pair correlations along one axis")
    p.add_argument("--region", required=True, choices=REGIONS)
    p.add_argument("--axis", required=True, choices=("mu", "u", "n", "n_d", "r"))
    _grid_args(p)
    p.add_argument("--r", nargs="+", type=int, default=[1], help="site separations")
    p.add_argument("--fit", type=float, default=None, metavar="LAMBDA_C",
                   help="fit derivative divergences at this critical value")
    p.add_argument("--window", nargs=2, type=float, default=[1e-4, 1e-2], metavar=("LO", "HI"))
    subs["scan"] = p

    p = sub.add_parser("kspace", parents=[common], help="(k, -k) mode-pair correlations along one axis")
    p.add_argument("--region", default="II", choices=REGIONS)
    p.add_argument("--axis", required=True, choices=("mu", "u", "n", "n_d"))
    _grid_args(p)
    subs["kspace"] = p

    p = sub.add_parser("monogamy", parents=[common], help="discord monogamy ratios")
    p.add_argument("--family", required=True, choices=("eta", "region1"))
    p.add_argument("--L-range", nargs=2, type=int, default=[3, 200], metavar=("LO", "HI"), dest="l_range")
    p.add_argument("--N-d", type=int, default=None, dest="pairs", help="fixed number of pairs")
    p.add_argument("--n-d", type=float, default=None, help="fixed pair density (lengths with integer N_d)")
    p.add_argument("--half", action="store_true", help="N_d = floor(L/2)")
    p.add_argument("--mu-range", nargs=2, type=float, default=[-0.5, -0.05], metavar=("LO", "HI"))
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--u", type=float, default=4.0)
    p.add_argument("--r-max", type=int, default=2000)
    subs["monogamy"] = p

    p = sub.add_parser("verify", parents=[common], help="run acceptance checks")
    p.add_argument("--suite", default="all", choices=sorted(SUITES))
    subs["verify"] = p
    return parser, subs


def _load_config(path: str, sub: argparse.ArgumentParser) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    known = {a.dest for a in sub._actions}
    out = {}
    for key, value in data.items():
        dest = {"N_d": "pairs", "L_range": "l_range"}.get(key, key.replace("-", "_"))
        if dest not in known or dest in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        out[dest] = value
    return out


def parse_args(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = subs[args.command]
        sub.set_defaults(**_load_config(args.config, sub))
        args = parser.parse_args(argv)
    return args


def search_config(args) -> SearchConfig:
    try:
        return SearchConfig(n_samples=args.samples, n_refine=args.n_refine, tol=args.tol, seed=args.seed)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# -- commands -------------------------------------------------------------------


def cmd_phase(args) -> int:
    grid = args.grid
    if len(grid) not in (1, 2) or min(grid) < 1:
        raise UsageError("--grid takes one or two positive counts")
    n_u, n_mu = (grid[0], grid[0]) if len(grid) == 1 else grid
    u_values = _axis_values(args.u_range, n_u, "--u-range")
    mu_values = _axis_values(args.mu_range, n_mu, "--mu-range")
    rows = []
    for u in u_values:
        for mu in mu_values:
            pt = model_point(float(u), float(mu))
            rows.append({
                "u": pt.u, "mu": pt.mu, "phase": str(pt.phase), "n_s": pt.n_s, "n_d": pt.n_d,
                "energy": energy_density(pt.n_s, pt.n_d, pt.u, pt.mu), "odlro": pt.odlro,
            })
    emit(args, "phase", ["u", "mu", "phase", "n_s", "n_d", "energy", "odlro"], rows)
    return EXIT_OK


def _axis_values(rng, count: int, flag: str) -> np.ndarray:
    lo, hi = rng
    if count == 1:
        if lo != hi:
            raise UsageError(f"{flag} must have LO == HI for a single point")
        return np.array([lo])
    if not hi > lo:
        raise UsageError(f"{flag} needs LO < HI")
    return np.linspace(lo, hi, count)


def _scan_values(args) -> np.ndarray:
    if (args.range is None) == (args.approach is None):
        raise UsageError("give exactly one of --range or --approach")
    if args.approach is not None:
        lam, side = args.approach
        if side not in (-1.0, 1.0):
            raise UsageError("--approach SIDE must be -1 or +1")
        return approach_grid(lam, int(side), num=args.points)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    lo, hi = args.range
    if not hi > lo:
        raise UsageError("--range needs LO < HI")
    if args.axis == "r":
        vals = np.unique(np.round(np.linspace(lo, hi, args.points)).astype(int))
        return vals.astype(float)
    return np.linspace(lo, hi, args.points)


def _fixed(args) -> dict:
    out = {}
    for key in ("u", "mu", "n", "n_d"):
        value = getattr(args, key, None)
        if value is not None and key != args.axis:
            out[key] = value
    return out


def _scan_rows(result, r: int) -> list[dict]:
    rows = []
    interior = {m: np.concatenate([[math.nan], d, [math.nan]]) for m, d in result.derivatives.items()}
    for k, (value, rec) in enumerate(zip(result.values, result.records)):
        n_s, n_d = result.densities[k]
        row = {"axis": result.axis, "value": float(value), "r": int(value) if result.axis == "r" else r,
               "n_s": float(n_s), "n_d": float(n_d)}
        for m, col in MEASURE_COLUMNS.items():
            row[col] = getattr(rec, m)
        row["method"] = rec.method
        for m in ("I", "C", "Q"):
            row[f"d_{MEASURE_COLUMNS[m]}"] = float(interior[m][k]) if m in interior else math.nan
        rows.append(row)
    return rows


SCAN_COLUMNS = (["axis", "value", "r", "n_s", "n_d"] + list(MEASURE_COLUMNS.values()) + ["method"]
                + [f"d_{MEASURE_COLUMNS[m]}" for m in ("I", "C", "Q")])


def _fit_rows(fits: list[FitReport], r: int) -> list[dict]:
    return [{"r": r, **f.as_dict()} for f in fits]


def cmd_scan(args, kspace: bool = False) -> int:
    values = _scan_values(args)
    cfg = search_config(args)
    r_list = [1] if kspace or args.axis == "r" else args.r
    rows, fit_rows = [], []
    for r in r_list:
        result = scan(args.region, args.axis, values, fixed=_fixed(args), r=r, kspace=kspace, cfg=cfg,
                      allow_crossing=args.allow_crossing)
        if len(result) >= 3:
            numerical_derivative(result)
        if not kspace and args.fit is not None:
            fit_rows += _fit_rows(critical_fits(result, args.fit, tuple(args.window)), r)
        rows += _scan_rows(result, r)
    emit(args, "kspace" if kspace else "scan", SCAN_COLUMNS, rows, {"fits": fit_rows} if fit_rows else None)
    return EXIT_OK


MONOGAMY_COLUMNS = ["family", "l", "pairs", "mu", "u", "q1", "q2_sum", "ratio", "ratio_lower", "ratio_upper",
                    "tail_bound", "violated", "k1_squared", "k2_squared_sum"]


def _monogamy_row(rep) -> dict:
    return {
        "family": rep.family, "l": rep.L, "pairs": rep.N_d, "mu": rep.mu, "u": rep.u, "q1": rep.Q1,
        "q2_sum": rep.Q2_sum, "ratio": rep.R, "ratio_lower": rep.R_lower, "ratio_upper": rep.R_upper,
        "tail_bound": rep.tail_bound, "violated": rep.violated, "k1_squared": rep.K1_squared,
        "k2_squared_sum": rep.K2_squared_sum,
    }


def cmd_monogamy(args) -> int:
    rows = []
    if args.family == "eta":
        chosen = sum(x is not None and x is not False for x in (args.pairs, args.n_d, args.half or None))
        if chosen != 1:
            raise UsageError("eta family needs exactly one of --N-d, --n-d, --half")
        lo, hi = args.l_range
        if lo < 3 or hi < lo:
            raise DomainError("--L-range needs 3 <= LO <= HI")
        for L in range(lo, hi + 1):
            if args.pairs is not None:
                N_d = args.pairs
            elif args.half:
                N_d = L // 2
            else:
                x = args.n_d * L
                if abs(x - round(x)) > 1e-9:
                    continue
                N_d = int(round(x))
            rows.append(_monogamy_row(monogamy_eta(L, N_d)))
    else:
        mus = _axis_values(args.mu_range, args.points, "--mu-range")
        rows = [_monogamy_row(monogamy_region1(float(mu), args.u, args.r_max)) for mu in mus]
    emit(args, "monogamy", MONOGAMY_COLUMNS, rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    def report(res):
        print(res.line(), file=sys.stderr, flush=True)

    results = run_suite(args.suite, search_config(args), args.seed, report=report)
    rows = [{"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    emit(args, "verify", ["criterion", "name", "passed", "detail"], rows)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"bchubbard: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "phase":
            return cmd_phase(args)
        if args.command == "scan":
            return cmd_scan(args)
        if args.command == "kspace":
            return cmd_scan(args, kspace=True)
        if args.command == "monogamy":
            return cmd_monogamy(args)
        return cmd_verify(args)
    except UsageError as exc:
        print(f"bchubbard: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, RuntimeError) as exc:
        print(f"bchubbard: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``bandcone {fit, critval, band, region, simulate, reproduce}``.

Results go to stdout (or ``--output``) as JSON or CSV.  Failures print one
JSON object ``{"error", "message", "exit_code"}`` on stderr and exit with

    0  success
    2  validation error (bad arguments, malformed data or region)
    3  numerical failure (non-convergence, quadrature or root-finding failure)
    4  reproduction mismatch (a computed value is outside its tolerance)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass
from importlib import resources
from itertools import product
from pathlib import Path

import numpy as np

from .bands import BandSpec, band_curve, band_to_csv, band_to_records
from .critval import ROOT_TOL, GParams, critical_value
from .errors import BandconeError, DesignError, DomainError, NumericalError
from .glm import Dataset, FittedModel, fit_logistic
from .mcsim import (
    DESIGN_BETAS,
    SimulationCell,
    design_interval,
    report_rows,
    simulate_alphas,
)
from .numkernel import as_spd, sym_sqrt
from .regions import (
    ConvexHull,
    IntervalCone,
    SearchConfig,
    Unrestricted,
    best_center_search,
    cone_from_interval,
    rect_generators,
    region_from_json,
    summarize,
)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_MISMATCH = 0, 2, 3, 4
DEFAULT_SEED = 20_240_613
SEED_ENV = "BANDCONE_SEED"
REPS_DEFAULT, REPS_FULL = 2000, 5000
TABLE_ALPHAS = (0.01, 0.05, 0.10)
TABLE_NS = (25, 50, 100, 150)
INTERVAL_CLASSES = ("narrow", "wide", "unrestricted")


class ReproductionMismatch(BandconeError):
    """A reproduced value differs from its published counterpart beyond tolerance."""


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("bandcone") / "fixtures" / name))


def _data_lines(text: str):
    """Yield ``(line number, row)`` for non-blank rows that are not ``#`` comments."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            yield lineno, next(csv.reader([line]))


def parse_dataset(path) -> tuple[Dataset, list[str]]:
    """Read a dataset CSV and return it with its predictor column names.

    Header row first; predictor columns, then ``successes``, then an optional
    ``trials`` column (absent means Bernoulli rows with ``trials = 1``).  An
    intercept column is prepended.  Lines starting with ``#`` are comments.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DesignError(f"cannot read dataset {path}: {exc.strerror}") from exc
    rows = list(_data_lines(text))
    if not rows:
        raise DesignError(f"{path}: no header row")
    _, header = rows[0]
    header = [h.strip() for h in header]
    has_trials = header[-1] == "trials"
    n_pred = len(header) - (2 if has_trials else 1)
    if n_pred < 1 or header[n_pred] != "successes":
        raise DesignError(
            f"{path}: header must be predictor columns, then 'successes', then optional 'trials'; got {header}"
        )
    x, y, m = [], [], []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise DesignError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            values = [float(v) for v in row]
        except ValueError as exc:
            raise DesignError(f"{path}: line {lineno}: {exc}") from exc
        if not all(math.isfinite(v) for v in values):
            raise DesignError(f"{path}: line {lineno}: non-finite value")
        succ, trials = values[n_pred], values[n_pred + 1] if has_trials else 1.0
        if succ != round(succ) or trials != round(trials) or trials < 1 or not 0 <= succ <= trials:
            raise DesignError(
                f"{path}: line {lineno}: need integer 0 <= successes <= trials, got {succ:g}/{trials:g}"
            )
        x.append([1.0] + values[:n_pred])
        y.append(succ)
        m.append(trials)
    if len(x) < n_pred + 1:
        raise DesignError(f"{path}: {len(x)} data rows cannot identify {n_pred + 1} parameters")
    return Dataset(np.array(x), np.array(y), np.array(m)), header[:n_pred]


def _json_arg(value: str):
    """Inline JSON, or a path to a JSON file."""
    if value.lstrip()[:1] in "[{":
        try:
            return json.loads(value)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid JSON argument: {exc}") from exc
    try:
        return json.loads(Path(value).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DomainError(f"cannot read {value}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"{value}: invalid JSON: {exc}") from exc


def load_fisher_inv(value: str) -> tuple[np.ndarray, np.ndarray | None]:
    """``F^-1`` (and ``beta_hat`` when present) from a JSON object or bare matrix."""
    obj = _json_arg(value)
    if isinstance(obj, dict):
        if "fisher_inv" not in obj:
            raise DomainError("fisher-inv JSON needs a 'fisher_inv' key")
        beta = obj.get("beta_hat")
        return np.array(obj["fisher_inv"], dtype=float), None if beta is None else np.array(beta, dtype=float)
    return np.array(obj, dtype=float), None


def _region_arg(args):
    if getattr(args, "interval", None):
        return IntervalCone(*args.interval)
    if getattr(args, "rectangle", None):
        return region_from_json({"type": "rectangle", "bounds": _json_arg(args.rectangle)})
    if getattr(args, "region", None):
        return region_from_json(_json_arg(args.region))
    return Unrestricted()


def _search_config(args) -> SearchConfig:
    return SearchConfig(args.grid_points, args.refinement_rounds)


def resolve_seed(cli_seed: int | None) -> int:
    """``$BANDCONE_SEED`` takes precedence over ``--seed``, then the built-in default."""
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise DomainError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return DEFAULT_SEED if cli_seed is None else cli_seed


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _records_to_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    fields = list(dict.fromkeys(k for rec in records for k in rec))
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in rec.items()})
    return buf.getvalue()


def emit(payload, fmt: str, output: str | None, rows_key: str | None = None) -> None:
    """Write ``payload`` as JSON, or as CSV (its ``rows_key`` list, else one flat record)."""
    payload = _plain(payload)
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        records = payload[rows_key] if rows_key else [payload]
        text = _records_to_csv(records)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _critical_record(crit) -> dict:
    return {
        "c": crit.c,
        "alpha": crit.alpha,
        "p": crit.params.p,
        "r": crit.params.r,
        "a": crit.params.a,
        "cdf_residual": crit.cdf_residual,
        "solver_tol": crit.solver_tol,
    }


def _fit_record(fit: FittedModel, columns: list[str]) -> dict:
    return {
        "columns": ["intercept"] + columns,
        "beta_hat": fit.beta_hat,
        "fisher_inv": np.asarray(fit.fisher_inv.entries),
        "iterations": fit.iterations,
        "grad_norm": fit.grad_norm,
        "converged": fit.converged,
        "loglik": fit.loglik,
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    data, columns = parse_dataset(args.data)
    emit(_fit_record(fit_logistic(data), columns), args.format, args.output)
    return EXIT_OK


def cmd_critval(args) -> int:
    crit = critical_value(args.alpha, GParams(args.p, args.r, args.a))
    emit(_critical_record(crit), args.format, args.output)
    return EXIT_OK


def _fisher_source(args) -> np.ndarray:
    if args.fisher_inv:
        return load_fisher_inv(args.fisher_inv)[0]
    if args.data:
        return np.asarray(fit_logistic(parse_dataset(args.data)[0]).fisher_inv.entries)
    raise DomainError("region needs --fisher-inv or --data")


def cmd_region(args) -> int:
    fisher_inv = as_spd(_fisher_source(args))
    region = _region_arg(args)
    summary = summarize(region, fisher_inv, _search_config(args))
    crit = critical_value(args.alpha, summary.gparams())
    record = {
        "p": summary.p,
        "r": summary.r,
        "a": summary.a,
        "x0": summary.x0,
        "phi": summary.phi,
        "degenerate": summary.degenerate,
        "c": crit.c,
        "alpha": args.alpha,
    }
    emit(record, args.format, args.output)
    return EXIT_OK


def _band_grid(args, region, data: Dataset) -> list[np.ndarray]:
    if args.grid_file:
        grid_data = [row for _, row in _data_lines(Path(args.grid_file).read_text(encoding="utf-8"))][1:]
        return [np.array([1.0] + [float(v) for v in row]) for row in grid_data]
    if isinstance(region, IntervalCone):
        ranges = [(region.lower, region.upper)]
    elif isinstance(region, ConvexHull):
        ranges = region.bounds
    else:
        free = data.design[:, 1:]
        ranges = list(zip(free.min(axis=0), free.max(axis=0)))
    axes = [np.linspace(lo, hi, args.points) for lo, hi in ranges]
    return [np.array((1.0,) + pt) for pt in product(*axes)]


def cmd_band(args) -> int:
    data, _ = parse_dataset(args.data)
    fit = fit_logistic(data)
    region = _region_arg(args)
    summary = summarize(region, fit.fisher_inv, _search_config(args))
    spec = BandSpec(fit, critical_value(args.alpha, summary.gparams()), region)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        points = band_curve(spec, _band_grid(args, region, data))
    if args.format == "csv":
        text = band_to_csv(points)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    else:
        payload = {"critical": _critical_record(spec.critical), "points": band_to_records(points)}
        emit(payload, "json", args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    beta = tuple(args.beta)
    interval = tuple(args.interval) if args.interval else design_interval(beta, args.interval_class)
    label = args.interval_class if not args.interval else "custom"
    cell = SimulationCell(beta, interval, args.n, args.alpha[0], args.reps, resolve_seed(args.seed))
    reports = simulate_alphas(cell, args.alpha, workers=args.workers)
    emit({"rows": report_rows(reports, [label] * len(reports))}, args.format, args.output, "rows")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Table reproduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableArtifact:
    """Computed-versus-published rows for one reproduced table."""

    table: str
    rows: tuple[dict, ...]

    @property
    def mismatches(self) -> list[dict]:
        return [row for row in self.rows if not row["ok"]]

    def to_json(self) -> dict:
        return {"table": self.table, "all_ok": not self.mismatches, "rows": list(self.rows)}


def _row(label, quantity, computed, published, tol, solver_tol=None, **extra) -> dict:
    diff = abs(computed - published)
    row = {
        "label": label,
        "quantity": quantity,
        "computed": computed,
        "published": published,
        "abs_diff": diff,
        "tol": tol,
        "ok": bool(diff <= tol),
    }
    if solver_tol is not None:
        row["solver_tol"] = solver_tol
    row.update(extra)
    return row


def _load_fixture(name: str) -> dict:
    return json.loads(fixture_path(name).read_text(encoding="utf-8"))


def reproduce_3_2() -> TableArtifact:
    """Fit the 9-AA data, derive a for each dose interval, and solve for c."""
    table = _load_fixture("table_3_2.json")
    data, _ = parse_dataset(fixture_path("lavelle_9aa.csv"))
    fit = fit_logistic(data)
    f = np.asarray(fit.fisher_inv.entries)
    b = np.asarray(sym_sqrt(fit.fisher_inv).entries)
    pub = table["fit"]
    rows = [_row("fit", f"beta_hat[{i}]", fit.beta_hat[i], pub["beta_hat"][i], 0.005) for i in range(2)]
    for i, j in ((0, 0), (0, 1), (1, 1)):
        rows.append(_row("fit", f"fisher_inv[{i}][{j}]", f[i, j], pub["fisher_inv"][i][j], 0.0005))
        rows.append(_row("fit", f"B[{i}][{j}]", b[i, j], pub["B"][i][j], 0.0005))
    lo, hi = table["phi_for"]["interval"]
    rows.append(_row(f"({lo}, {hi})", "phi", cone_from_interval(lo, hi, fit.fisher_inv).phi, table["phi_for"]["phi"], 0.002))
    alpha = table["alpha"]
    for entry in table["rows"]:
        if entry["interval"] is None:
            crit = critical_value(alpha, GParams(2, 2, 0.0))
            rows.append(_row("unrestricted", "c", crit.c, entry["c"], 0.001, crit.solver_tol))
            continue
        lo, hi = entry["interval"]
        summary = cone_from_interval(lo, hi, fit.fisher_inv)
        crit = critical_value(alpha, summary.gparams())
        label = f"({lo}, {hi})"
        rows.append(_row(label, "a", summary.a, entry["a"], 0.0015))
        rows.append(_row(label, "c", crit.c, entry["c"], 0.002, crit.solver_tol))
    return TableArtifact("3.2", tuple(rows))


def reproduce_3_3(config: SearchConfig = SearchConfig()) -> TableArtifact:
    """Best-centre search over each ICU rectangle with the published ``F^-1``."""
    table = _load_fixture("table_3_3.json")
    icu = _load_fixture("icu_fisher_inv.json")
    fisher_inv = as_spd(np.array(icu["fisher_inv"]))
    published_search = icu["published_search"]
    alpha = table["alpha"]
    rows = []
    for entry in table["rows"]:
        if entry["bounds"] is None:
            crit = critical_value(alpha, GParams(3, 3, 0.0))
            rows.append(_row("unrestricted", "c", crit.c, entry["c"], 0.001, crit.solver_tol))
            continue
        bounds = entry["bounds"]
        label = json.dumps(bounds)
        start = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            summary = best_center_search(rect_generators(bounds), fisher_inv, bounds, config)
        elapsed = time.perf_counter() - start
        crit = critical_value(alpha, summary.gparams())
        given = critical_value(alpha, GParams(3, 1, entry["a"]))
        rows.append(_row(label, "a", summary.a, entry["a"], 0.001, search_seconds=elapsed))
        rows.append(_row(label, "c", crit.c, entry["c"], 0.002, crit.solver_tol))
        rows.append(_row(label, "c_given_published_a", given.c, entry["c"], 0.002, given.solver_tol))
        if bounds == published_search["bounds"]:
            n = config.grid_points_per_dim
            for k, (lo, hi) in enumerate(bounds, start=1):
                cell_width = (hi - lo) / (n - 1)
                rows.append(_row(label, f"x0[{k}]", summary.x0[k], published_search["x0"][k], cell_width))
    return TableArtifact("3.3", tuple(rows))


def _cell_seed(master: int, beta, n: int, interval_class: str) -> int:
    """Independent 64-bit seed per design point (shared across alpha)."""
    index = DESIGN_BETAS.index(tuple(beta)) * 100 + TABLE_NS.index(n) * 10 + INTERVAL_CLASSES.index(interval_class)
    return int(np.random.SeedSequence([master, index]).generate_state(1, np.uint64)[0])


def reproduce_4_2(
    n_reps: int,
    seed: int,
    betas=DESIGN_BETAS,
    ns=TABLE_NS,
    classes=INTERVAL_CLASSES,
    alphas=TABLE_ALPHAS,
    workers: int = 1,
) -> TableArtifact:
    """Coverage simulation over the design grid, compared with the published errors.

    Tolerance per cell is three standard errors of the difference of two
    independent binomial estimates at the nominal level, with ``n_reps`` and
    the published 5000 replications.
    """
    published = {
        (tuple(c["beta"]), c["n"], c["interval"], c["alpha"]): c["error"]
        for c in _load_fixture("table_4_2.json")["cells"]
    }
    rows = []
    for beta, n, cls in product(betas, ns, classes):
        beta = tuple(float(b) for b in beta)
        base = SimulationCell(beta, design_interval(beta, cls), n, alphas[0], n_reps, _cell_seed(seed, beta, n, cls))
        reports = simulate_alphas(base, alphas, workers=workers)
        for report, rec in zip(reports, report_rows(reports, [cls] * len(alphas))):
            alpha = report.cell.alpha
            tol = 3.0 * math.sqrt(alpha * (1.0 - alpha) * (1.0 / n_reps + 1.0 / REPS_FULL))
            label = f"beta={list(beta)} n={n} {cls} alpha={alpha}"
            rows.append(
                _row(
                    label,
                    "error",
                    report.error_estimate,
                    published[(beta, n, cls, alpha)],
                    tol,
                    std_error=rec["std_error"],
                    n_reps=n_reps,
                    n_regenerated=rec["n_regenerated"],
                    seed=rec["seed"],
                )
            )
    return TableArtifact("4.2", tuple(rows))


def cmd_reproduce(args) -> int:
    if args.table == "3.2":
        artifact = reproduce_3_2()
    elif args.table == "3.3":
        artifact = reproduce_3_3(_search_config(args))
    else:
        n_reps = args.reps or (REPS_FULL if args.full else REPS_DEFAULT)
        betas = [tuple(b) for b in args.beta] if args.beta else DESIGN_BETAS
        for b in betas:
            if tuple(float(v) for v in b) not in DESIGN_BETAS:
                raise DomainError(f"beta {list(b)} is not a design point; choose from {list(DESIGN_BETAS)}")
        for n in args.n or ():
            if n not in TABLE_NS:
                raise DomainError(f"n={n} is not a design point; choose from {list(TABLE_NS)}")
        alphas = tuple(args.alpha) if args.alpha else TABLE_ALPHAS
        for a in alphas:
            if a not in TABLE_ALPHAS:
                raise DomainError(f"alpha={a} is not a design level; choose from {list(TABLE_ALPHAS)}")
        artifact = reproduce_4_2(
            n_reps,
            resolve_seed(args.seed),
            betas=betas,
            ns=tuple(args.n) if args.n else TABLE_NS,
            classes=tuple(args.interval_class) if args.interval_class else INTERVAL_CLASSES,
            alphas=alphas,
            workers=args.workers,
        )
    emit(artifact.to_json(), args.format, args.output, "rows")
    if artifact.mismatches:
        raise ReproductionMismatch(
            f"table {artifact.table}: {len(artifact.mismatches)} of {len(artifact.rows)} values outside tolerance"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _alpha(value: str) -> float:
    a = float(value)
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {value}")
    return a


def _add_output(sub):
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--output", "-o", help="write here instead of stdout")


def _add_region(sub):
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--interval", nargs=2, type=float, metavar=("LOWER", "UPPER"))
    group.add_argument("--rectangle", help='bounds as JSON, e.g. "[[16,92],[36,256]]"')
    group.add_argument("--region", help="region JSON (inline or file path)")
    sub.add_argument("--grid-points", type=int, default=SearchConfig.grid_points_per_dim)
    sub.add_argument("--refinement-rounds", type=int, default=SearchConfig.refinement_rounds)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bandcone", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("fit", help="fit the logistic model to a dataset CSV")
    sub.add_argument("data")
    _add_output(sub)
    sub.set_defaults(func=cmd_fit)

    sub = subs.add_parser("critval", help="critical value for (p, r, a)")
    sub.add_argument("--alpha", type=_alpha, default=0.05)
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--r", type=int, required=True)
    sub.add_argument("--a", type=float, required=True)
    _add_output(sub)
    sub.set_defaults(func=cmd_critval)

    sub = subs.add_parser("region", help="reduce a region to (p, r, a) and its critical value")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--fisher-inv", help="JSON with a 'fisher_inv' matrix, or a bare matrix")
    source.add_argument("--data", help="dataset CSV to fit first")
    _add_region(sub)
    sub.add_argument("--alpha", type=_alpha, default=0.05)
    _add_output(sub)
    sub.set_defaults(func=cmd_region)

    sub = subs.add_parser("band", help="simultaneous band over a grid of predictor values")
    sub.add_argument("data")
    _add_region(sub)
    sub.add_argument("--alpha", type=_alpha, default=0.05)
    sub.add_argument("--points", type=int, default=101, help="grid points per predictor")
    sub.add_argument("--grid-file", help="CSV of predictor values (header row, no intercept)")
    _add_output(sub)
    sub.set_defaults(func=cmd_band)

    sub = subs.add_parser("simulate", help="Monte Carlo coverage for one design cell")
    sub.add_argument("--beta", nargs=2, type=float, required=True, metavar=("B0", "B1"))
    where = sub.add_mutually_exclusive_group(required=True)
    where.add_argument("--interval", nargs=2, type=float, metavar=("LOWER", "UPPER"))
    where.add_argument("--interval-class", choices=INTERVAL_CLASSES)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--alpha", type=_alpha, nargs="+", default=[0.05])
    sub.add_argument("--reps", type=int, default=REPS_DEFAULT)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--workers", type=int, default=1)
    _add_output(sub)
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("reproduce", help="recompute a published table and compare")
    sub.add_argument("table", choices=("3.2", "3.3", "4.2"))
    sub.add_argument("--full", action="store_true", help=f"table 4.2 with {REPS_FULL} replications per cell")
    sub.add_argument("--reps", type=int, help="table 4.2 replications per cell (overrides --full)")
    sub.add_argument("--beta", nargs=2, type=float, action="append", metavar=("B0", "B1"))
    sub.add_argument("--n", type=int, nargs="+")
    sub.add_argument("--interval-class", choices=INTERVAL_CLASSES, nargs="+")
    sub.add_argument("--alpha", type=_alpha, nargs="+")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--grid-points", type=int, default=SearchConfig.grid_points_per_dim)
    sub.add_argument("--refinement-rounds", type=int, default=SearchConfig.refinement_rounds)
    _add_output(sub)
    sub.set_defaults(func=cmd_reproduce)
    return parser


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ReproductionMismatch as exc:
        return _fail(exc, EXIT_MISMATCH)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except (BandconeError, ValueError, OSError) as exc:
        return _fail(exc, EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())

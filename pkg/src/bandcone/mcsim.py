"""Monte Carlo coverage of interval-restricted bands in simple logistic regression.

Each replication draws Bernoulli responses at ``n`` equally spaced doses in
``[l, u]``, refits the model, rebuilds the interval cone and critical value
from the refitted ``F^-1``, and records whether the band covers the true
linear predictor over the whole interval.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .critval import critical_value
from .errors import ConvergenceError, DomainError
from .glm import Dataset, FittedModel, fit_logistic, logistic
from .numkernel import sym_sqrt
from .regions import cone_from_interval

MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class SimulationCell:
    beta_true: tuple[float, float]
    interval: tuple[float, float]
    n: int
    alpha: float
    n_reps: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "beta_true", tuple(float(b) for b in self.beta_true))
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        if len(self.beta_true) != 2:
            raise DomainError("beta_true must have two entries")
        if not self.interval[0] < self.interval[1]:
            raise DomainError(f"interval needs l < u, got {self.interval}")
        if self.n < 10:
            raise DomainError(f"n must be >= 10, got {self.n}")
        if self.n_reps < 1:
            raise DomainError("n_reps must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class CoverageReport:
    cell: SimulationCell
    error_estimate: float
    std_error: float
    n_converged: int
    n_regenerated: int


def invert_logit_endpoint(prob: float, beta) -> float:
    """Dose ``x`` with ``logistic(beta0 + beta1 x) = prob``."""
    b0, b1 = float(beta[0]), float(beta[1])
    if not 0.0 < prob < 1.0:
        raise DomainError(f"prob must lie in (0, 1), got {prob}")
    if b1 == 0.0:
        raise DomainError("slope must be nonzero to invert the logit")
    return (math.log(prob / (1.0 - prob)) - b0) / b1


def _rng(seed) -> np.random.Generator:
    key = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def generate_dataset(beta, interval, n: int, seed) -> Dataset:
    """Bernoulli responses at ``n`` equidistant doses spanning ``[l, u]``.

    ``Y_i = 1`` exactly when a uniform draw falls below ``p(x_i)``.  ``seed``
    is an integer or a sequence of integers (a substream key).
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    x = np.linspace(interval[0], interval[1], n)
    prob = logistic(beta[0] + beta[1] * x)
    y = (_rng(seed).random(n) < prob).astype(float)
    return Dataset(np.column_stack([np.ones(n), x]), y, np.ones(n))


def sup_statistic(beta_true, fit: FittedModel, interval) -> float:
    """``sup_{l<=x<=u} |x'(beta - beta_hat)| / se(x)`` computed exactly.

    With ``B`` the symmetric root of ``F^-1`` and ``N = B^-1 (beta - beta_hat)``,
    the ratio equals ``|e(x)'N|`` for the unit vector ``e(x)`` along ``B x``.
    Those directions sweep an arc of angle < pi.  The sup is ``|N|`` when
    ``+N`` or ``-N`` points into the arc and the larger edge value otherwise.
    """
    b = sym_sqrt(fit.fisher_inv).entries
    diff = np.asarray(beta_true, dtype=float) - fit.beta_hat
    nvec = np.linalg.solve(b, diff)
    norm = float(np.linalg.norm(nvec))
    if norm == 0.0:
        return 0.0
    e_lo = b @ np.array([1.0, interval[0]])
    e_hi = b @ np.array([1.0, interval[1]])
    e_lo /= np.linalg.norm(e_lo)
    e_hi /= np.linalg.norm(e_hi)
    # N = s e_lo + t e_hi; N (or -N) lies in the arc when s, t share a sign
    s, t = np.linalg.solve(np.column_stack([e_lo, e_hi]), nvec)
    if s * t >= 0.0:
        return norm
    return max(abs(float(e_lo @ nvec)), abs(float(e_hi @ nvec)))


def sup_statistic_grid(beta_true, fit: FittedModel, interval, n_points: int = 2001) -> float:
    """Grid approximation of :func:`sup_statistic` on the original scale."""
    x = np.column_stack([np.ones(n_points), np.linspace(interval[0], interval[1], n_points)])
    diff = np.asarray(beta_true, dtype=float) - fit.beta_hat
    se = np.sqrt(np.einsum("ij,jk,ik->i", x, np.asarray(fit.fisher_inv.entries), x))
    return float(np.max(np.abs(x @ diff) / se))


def covers(beta_true, fit: FittedModel, interval, c: float) -> bool:
    """Whether the band with critical value ``c`` contains the true line on the interval."""
    return sup_statistic(beta_true, fit, interval) < c


def _fit_replication(cell: SimulationCell, rep: int) -> tuple[FittedModel, int]:
    for attempt in range(MAX_ATTEMPTS):
        data = generate_dataset(cell.beta_true, cell.interval, cell.n, (cell.seed, rep, attempt))
        try:
            return fit_logistic(data), attempt
        except (ConvergenceError, DomainError):
            continue
    raise ConvergenceError(f"replication {rep}: no estimable dataset in {MAX_ATTEMPTS} draws")


def _run_reps(cell: SimulationCell, alphas: tuple[float, ...], reps: range) -> tuple[list[int], int]:
    misses = [0] * len(alphas)
    regenerated = 0
    for rep in reps:
        fit, redraws = _fit_replication(cell, rep)
        regenerated += redraws
        summary = cone_from_interval(cell.interval[0], cell.interval[1], fit.fisher_inv)
        stat = sup_statistic(cell.beta_true, fit, cell.interval)
        for j, alpha in enumerate(alphas):
            if not stat < critical_value(alpha, summary.gparams()).c:
                misses[j] += 1
    return misses, regenerated


def _run_chunks(cell: SimulationCell, alphas: tuple[float, ...], workers: int) -> tuple[list[int], int]:
    if workers > 1:
        bounds = np.linspace(0, cell.n_reps, workers + 1).astype(int)
        chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_reps, [cell] * len(chunks), [alphas] * len(chunks), chunks))
    else:
        parts = [_run_reps(cell, alphas, range(cell.n_reps))]
    misses = [sum(m[j] for m, _ in parts) for j in range(len(alphas))]
    return misses, sum(r for _, r in parts)


def _report(cell: SimulationCell, misses: int, regenerated: int) -> CoverageReport:
    err = misses / cell.n_reps
    return CoverageReport(
        cell=cell,
        error_estimate=err,
        std_error=math.sqrt(err * (1.0 - err) / cell.n_reps),
        n_converged=cell.n_reps,
        n_regenerated=regenerated,
    )


def simulate_cell(cell: SimulationCell, workers: int = 1) -> CoverageReport:
    """Estimate the non-coverage rate of the band for one design cell.

    Replication ``i`` draws from the substream ``(seed, i, attempt)``; datasets
    whose fit does not exist (separation) are redrawn with the next
    ``attempt`` and counted in ``n_regenerated``.  The report depends only on
    the cell, not on ``workers``.
    """
    misses, regenerated = _run_chunks(cell, (cell.alpha,), workers)
    return _report(cell, misses[0], regenerated)


def simulate_alphas(cell: SimulationCell, alphas, workers: int = 1) -> list[CoverageReport]:
    """:func:`simulate_cell` for several nominal levels sharing one set of fits.

    The datasets depend on the seed but not on alpha, so report ``j`` equals
    ``simulate_cell(replace(cell, alpha=alphas[j]))`` at a fraction of the cost.
    """
    alphas = tuple(float(a) for a in alphas)
    cells = [replace(cell, alpha=a) for a in alphas]
    misses, regenerated = _run_chunks(cell, alphas, workers)
    return [_report(c, m, regenerated) for c, m in zip(cells, misses)]


# Five slope/intercept pairs and the probabilities that fix interval endpoints.
DESIGN_BETAS = ((-2.0, 0.3), (0.0, 1.5), (2.0, 5.0), (-0.2, -0.3), (-2.0, -4.0))
INTERVAL_PROBS = {"narrow": (0.3, 0.7), "wide": (0.1, 0.9), "unrestricted": (1e-10, 1.0 - 1e-10)}


def design_interval(beta, interval_class: str) -> tuple[float, float]:
    """Interval endpoints for a design beta and interval class, sorted ascending."""
    lo_p, hi_p = INTERVAL_PROBS[interval_class]
    ends = sorted((invert_logit_endpoint(lo_p, beta), invert_logit_endpoint(hi_p, beta)))
    return ends[0], ends[1]


def report_rows(reports: list[CoverageReport], labels: list[str] | None = None) -> list[dict]:
    """Flatten reports into Table-style rows (beta, n, interval class, alpha, error)."""
    labels = labels or [""] * len(reports)
    rows = []
    for rep, label in zip(reports, labels):
        cell = rep.cell
        rows.append(
            {
                "beta0": cell.beta_true[0],
                "beta1": cell.beta_true[1],
                "n": cell.n,
                "interval": label,
                "lower": cell.interval[0],
                "upper": cell.interval[1],
                "alpha": cell.alpha,
                "error": rep.error_estimate,
                "std_error": rep.std_error,
                "n_reps": cell.n_reps,
                "n_regenerated": rep.n_regenerated,
                "seed": cell.seed,
            }
        )
    return rows

"""Maximum-likelihood fitting of the logistic model ``p(x) = 1 / (1 + exp(-x'beta))``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DesignError, DomainError, NotPositiveDefiniteError
from .numkernel import SpdMatrix, spd_invert

BETA_BOUND = 30.0
SATURATION = 1e-10
SATURATION_PATIENCE = 5
STEP_TOL = 1e-6


def logistic(eta):
    """Overflow-safe inverse logit; exact 0/1 only where float64 saturates."""
    eta = np.asarray(eta, dtype=float)
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    e = np.exp(eta[~pos])
    out[~pos] = e / (1.0 + e)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Grouped-binomial data: ``successes[i]`` out of ``trials[i]`` at design row ``i``.

    The design's first column must be all ones (the intercept).
    """

    design: np.ndarray
    successes: np.ndarray
    trials: np.ndarray

    def __post_init__(self):
        x = np.array(self.design, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.array(self.successes, dtype=float)
        m = np.array(self.trials, dtype=float)
        n, p = x.shape
        if y.shape != (n,) or m.shape != (n,):
            raise DesignError("successes and trials must have one entry per design row")
        if not np.all(x[:, 0] == 1.0):
            raise DesignError("first design column must be the intercept (all ones)")
        if np.any(y != np.round(y)) or np.any(m != np.round(m)):
            raise DesignError("successes and trials must be integers")
        if np.any(m < 1):
            raise DesignError("trials must be positive")
        if np.any(y < 0) or np.any(y > m):
            bad = int(np.argmax((y < 0) | (y > m)))
            raise DesignError(f"row {bad}: successes must lie in [0, trials]")
        if n < p:
            raise DesignError(f"need at least p={p} rows, got {n}")
        if np.linalg.matrix_rank(x) < p:
            raise DesignError("design matrix is rank deficient")
        for arr in (x, y, m):
            arr.setflags(write=False)
        object.__setattr__(self, "design", x)
        object.__setattr__(self, "successes", y)
        object.__setattr__(self, "trials", m)

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def p(self) -> int:
        return self.design.shape[1]

    def expand(self) -> "Dataset":
        """Equivalent Bernoulli encoding (one row per trial)."""
        rows, ys = [], []
        for xi, yi, mi in zip(self.design, self.successes.astype(int), self.trials.astype(int)):
            rows.extend([xi] * mi)
            ys.extend([1] * yi + [0] * (mi - yi))
        return Dataset(np.array(rows), np.array(ys), np.ones(len(ys)))


@dataclass(frozen=True, eq=False)
class FittedModel:
    beta_hat: np.ndarray
    fisher_inv: SpdMatrix
    iterations: int
    grad_norm: float
    converged: bool
    loglik: float = float("nan")
    loglik_trace: tuple[float, ...] = field(default=(), repr=False)

    @property
    def p(self) -> int:
        return self.beta_hat.shape[0]


def _loglik(x, y, m, beta) -> float:
    eta = x @ beta
    return float(np.sum(y * eta - m * np.logaddexp(0.0, eta)))


def fit_logistic(data: Dataset, max_iter: int = 50, tol: float = 1e-10) -> FittedModel:
    """Newton-Raphson (IRLS) fit from ``beta = 0`` with step halving.

    Converges when the score ``X'(y - m p_hat)`` has Euclidean norm <= ``tol``
    and the Newton step there is below ``STEP_TOL``; a diverging fit can have a
    tiny score while its steps stay of order one.
    Raises :class:`ConvergenceError` on separation (``|beta|_inf > 30``, or a
    fitted probability within 1e-10 of 0/1 for ``SATURATION_PATIENCE``
    consecutive iterations while the score stays above ``tol``) or when
    ``max_iter`` is exhausted.
    """
    x, y, m = data.design, data.successes, data.trials
    beta = np.zeros(data.p)
    ll = _loglik(x, y, m, beta)
    trace = [ll]
    saturated_run = 0
    for it in range(max_iter + 1):
        mu = logistic(x @ beta)
        score = x.T @ (y - m * mu)
        grad_norm = float(np.linalg.norm(score))
        weights = m * mu * (1.0 - mu)
        info = (x.T * weights) @ x
        try:
            step = np.linalg.solve(info, score)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular information matrix during Newton step") from exc
        if grad_norm <= tol and np.max(np.abs(step)) <= STEP_TOL:
            try:
                fisher_inv = spd_invert(info)
            except NotPositiveDefiniteError as exc:
                raise ConvergenceError(f"Fisher information is singular at the MLE: {exc}") from exc
            return FittedModel(beta, fisher_inv, it, grad_norm, True, ll, tuple(trace))
        if it == max_iter:
            break
        saturated = np.any((mu < SATURATION) | (mu > 1.0 - SATURATION))
        saturated_run = saturated_run + 1 if saturated else 0
        if np.max(np.abs(beta)) > BETA_BOUND or saturated_run >= SATURATION_PATIENCE:
            raise ConvergenceError(
                f"separation detected after {it} iterations (|beta|_inf={np.max(np.abs(beta)):.3g})"
            )
        for _ in range(40):
            candidate = beta + step
            ll_new = _loglik(x, y, m, candidate)
            # round-off slack: near the optimum ll changes below float resolution
            if ll_new >= ll - 1e-12 * (1.0 + abs(ll)):
                break
            step = 0.5 * step
        else:
            # no ascent possible: at the numerical optimum but score still above tol
            break
        beta, ll = candidate, ll_new
        trace.append(ll)
    raise ConvergenceError(
        f"no convergence in {max_iter} iterations (score norm {grad_norm:.3g}, "
        f"Newton step {np.max(np.abs(step)):.3g})"
    )


def linear_predictor_se(x, model: FittedModel) -> float:
    """Standard error ``(x' F^-1 x)^(1/2)`` of the fitted linear predictor."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.p,):
        raise DomainError(f"x must have length {model.p}, got shape {x.shape}")
    return float(np.sqrt(max(model.fisher_inv.quad(x), 0.0)))

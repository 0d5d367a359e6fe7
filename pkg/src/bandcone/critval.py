"""Distribution of the sup statistic G and the simultaneous critical value.

For a region ``{x : rho(x, E) >= a}`` with ``dim E = r`` in a ``p``-parameter
model,

    P(G <= g) = F_p(g) + integral_g^{g/(1-a^2)} H(m(sqrt(g/w))) f_p(w) dw

with ``F_p``/``f_p`` the chi-square(p) cdf/density, ``H`` the beta(r/2, (p-r)/2)
cdf and ``m(t) = (a t - sqrt((1-a^2)(1-t^2)))^2``.  The critical value is
``c = sqrt(g*)`` where ``P(G <= g*) = 1 - alpha``.

The integral is evaluated in the angle variable ``w = g / cos^2(theta)``.
With ``gamma = arccos(a)`` the integrand becomes analytic on the finite range
``theta in [0, pi/2 - gamma]`` (``m`` turns into ``cos^2(theta + gamma)``),
which removes the square-root kink at ``w = g`` and the unbounded upper limit
as ``a -> 1``.  The literal ``w`` form is kept as ``method="direct"`` for
cross-checking.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, DomainError
from .numkernel import (
    QuadratureSpec,
    RootBracket,
    adaptive_integrate,
    beta_cdf,
    brent_root,
    chi2_cdf,
    chi2_pdf,
    chi2_quantile,
)

CDF_QUADRATURE = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-10, max_subdivisions=60)
ROOT_TOL = 1e-9


@dataclass(frozen=True)
class GParams:
    p: int
    r: int
    a: float

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"p must be a positive integer, got {self.p}")
        if int(self.r) != self.r or not 1 <= self.r <= self.p:
            raise DomainError(f"r must satisfy 1 <= r <= p, got r={self.r}, p={self.p}")
        if not 0.0 <= self.a <= 1.0:
            raise DomainError(f"a must lie in [0, 1], got {self.a}")


@dataclass(frozen=True)
class CriticalValue:
    c: float
    alpha: float
    params: GParams
    cdf_residual: float
    solver_tol: float


def m_func(t: float, a: float) -> float:
    """``m(t) = (a t - sqrt((1 - a^2)(1 - t^2)))^2`` on ``0 <= t <= 1``."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"m_func needs 0 <= t <= 1, got {t}")
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"m_func needs 0 <= a <= 1, got {a}")
    return (a * t - math.sqrt((1.0 - a * a) * (1.0 - t * t))) ** 2


def _tail_integral_angle(g: float, p: int, r: int, a: float, spec: QuadratureSpec) -> float:
    gamma = math.acos(a)
    upper = 0.5 * math.pi - gamma
    hb_a, hb_b = 0.5 * r, 0.5 * (p - r)

    def integrand(theta: float) -> float:
        cos_t = math.cos(theta)
        if cos_t <= 0.0:
            return 0.0
        sec2 = 1.0 / (cos_t * cos_t)
        w = g * sec2
        m = math.cos(theta + gamma) ** 2
        return beta_cdf(min(m, 1.0), hb_a, hb_b) * chi2_pdf(w, p) * 2.0 * w * math.tan(theta)

    return adaptive_integrate(integrand, 0.0, upper, spec)


def _tail_integral_direct(g: float, p: int, r: int, a: float, spec: QuadratureSpec) -> float:
    if a >= 1.0:
        raise DomainError("the direct form needs a < 1 (infinite upper limit)")
    hb_a, hb_b = 0.5 * r, 0.5 * (p - r)

    def integrand(w: float) -> float:
        t = min(1.0, math.sqrt(g / w))
        return beta_cdf(min(m_func(t, a), 1.0), hb_a, hb_b) * chi2_pdf(w, p)

    return adaptive_integrate(integrand, g, g / (1.0 - a * a), spec)


def cdf_G(g: float, params: GParams, spec: QuadratureSpec = CDF_QUADRATURE, method: str = "angle") -> float:
    """Distribution function ``P(G <= g)``.

    ``method`` selects the angle-substituted integral (default) or the
    literal integral over ``w``.  For ``r == p`` the region is the whole
    space and the chi-square(p) cdf is returned.
    """
    if g < 0 or math.isnan(g):
        raise DomainError(f"cdf_G needs g >= 0, got {g}")
    p, r, a = params.p, params.r, params.a
    base = chi2_cdf(g, p)
    if g == 0.0 or r == p or a == 0.0:
        return base
    if method == "angle":
        tail = _tail_integral_angle(g, p, r, a, spec)
    elif method == "direct":
        tail = _tail_integral_direct(g, p, r, a, spec)
    else:
        raise DomainError(f"unknown method {method!r}")
    return min(1.0, max(0.0, base + tail))


def critical_value(alpha: float, params: GParams, tol: float = ROOT_TOL) -> CriticalValue:
    """Solve ``P(G <= c^2) = 1 - alpha`` for the simultaneous critical value.

    The root in ``g`` is bracketed by the chi-square(r) and chi-square(p)
    quantiles (the a = 1 and a = 0 limits).
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    target = 1.0 - alpha
    p, r, a = params.p, params.r, params.a
    hi = chi2_quantile(target, p)
    if r == p or a == 0.0:
        return CriticalValue(math.sqrt(hi), alpha, params, chi2_cdf(hi, p) - target, tol)
    lo = chi2_quantile(target, r)

    def excess(g: float) -> float:
        return cdf_G(g, params) - target

    f_lo, f_hi = excess(lo), excess(hi)
    # endpoints are exact roots at a = 1 / a = 0; accept quadrature-level noise
    if abs(f_lo) <= tol:
        g_star, resid = lo, f_lo
    elif abs(f_hi) <= tol:
        g_star, resid = hi, f_hi
    else:
        if (f_lo > 0) == (f_hi > 0):
            raise BracketError(
                f"cdf_G does not cross {target} on [{lo}, {hi}] (residuals {f_lo:.3g}, {f_hi:.3g})"
            )
        cache = {lo: f_lo, hi: f_hi}
        g_star = brent_root(lambda g: cache[g] if g in cache else excess(g), RootBracket(lo, hi, tol))
        resid = excess(g_star)
    return CriticalValue(math.sqrt(g_star), alpha, params, resid, tol)


# ---------------------------------------------------------------------------
# Monte Carlo oracle
# ---------------------------------------------------------------------------

ORACLE_BLOCK = 1 << 16


def _polar_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """Marsaglia polar method: standard normals from pairs of uniforms."""
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        # each accepted pair yields two normals; acceptance rate is pi/4
        n_pairs = int(1.02 * need / (0.5 * math.pi)) + 16
        u = 2.0 * rng.random((n_pairs, 2)) - 1.0
        s = np.einsum("ij,ij->i", u, u)
        keep = (s > 0.0) & (s < 1.0)
        u, s = u[keep], s[keep]
        z = (u * np.sqrt(-2.0 * np.log(s) / s)[:, None]).ravel()
        take = min(need, z.size)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


def _oracle_block(params: GParams, g_grid: np.ndarray, n: int, seed: int, block: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    p, r = params.p, params.r
    z = _polar_normals(rng, n * p).reshape(n, p)
    norm_u2 = np.einsum("ij,ij->i", z[:, :r], z[:, :r])
    w = norm_u2 + np.einsum("ij,ij->i", z[:, r:], z[:, r:])
    phi = np.arccos(np.clip(np.sqrt(norm_u2 / w), 0.0, 1.0))
    gamma = math.acos(params.a)
    sup_cos2 = np.where(phi <= gamma, 1.0, np.cos(phi - gamma) ** 2)
    stat = np.sort(w * sup_cos2)
    return np.searchsorted(stat, g_grid, side="right")


def oracle_cdf_G(
    params: GParams,
    g_grid,
    n_draws: int,
    seed: int,
    workers: int = 1,
) -> list[tuple[float, float, float]]:
    """Simulate ``G`` directly from its normal-vector construction.

    ``u ~ N_r(0, I)`` and ``v ~ N_{p-r}(0, I)`` give ``w = |u|^2 + |v|^2`` and
    the angle ``phi = arccos(|u| / sqrt(w))``; then
    ``G = w`` if ``phi <= arccos(a)`` else ``w cos^2(phi - arccos(a))``.

    Draws are split into fixed blocks of ``ORACLE_BLOCK`` with independent
    Philox streams keyed by ``(seed, block)``, so the result does not depend
    on ``workers``.  Returns ``(g, empirical cdf, binomial std error)``.
    """
    if n_draws < 10_000:
        raise DomainError(f"oracle needs at least 1e4 draws, got {n_draws}")
    grid = np.asarray(g_grid, dtype=float)
    sizes = [ORACLE_BLOCK] * (n_draws // ORACLE_BLOCK)
    if n_draws % ORACLE_BLOCK:
        sizes.append(n_draws % ORACLE_BLOCK)
    jobs = [(params, grid, n, seed, i) for i, n in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _oracle_block(*job), jobs))
    else:
        counts = [_oracle_block(*job) for job in jobs]
    hits = np.sum(counts, axis=0)
    probs = hits / n_draws
    ses = np.sqrt(probs * (1.0 - probs) / n_draws)
    return [(float(g), float(pr), float(se)) for g, pr, se in zip(grid, probs, ses)]

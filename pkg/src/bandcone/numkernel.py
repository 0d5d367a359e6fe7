"""Special functions, quadrature, root finding and small SPD linear algebra.

Everything here is self-contained (``math`` plus numpy array storage) so the
rest of the package has one audited numerical base.  The chi-square and beta
distribution functions go through the regularized incomplete gamma and beta
functions, each evaluated by a power series or a continued fraction depending
on which side of the usual crossover the argument falls.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable

import numpy as np

from .errors import (
    BracketError,
    DomainError,
    IntegrationError,
    NotPositiveDefiniteError,
)

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_CF_MAX_ITER = 10_000

# ---------------------------------------------------------------------------
# Incomplete gamma / chi-square
# ---------------------------------------------------------------------------


def _gamma_p_series(a: float, x: float) -> float:
    total = term = 1.0 / a
    ap = a
    for _ in range(_CF_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_cf(a: float, x: float) -> float:
    # modified Lentz on the Legendre continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x)."""
    if a <= 0 or x < 0:
        raise DomainError(f"gamma_p needs a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _gamma_p_series(a, x))
    return max(0.0, 1.0 - _gamma_q_cf(a, x))


def _check_dof(k) -> None:
    if k < 1 or int(k) != k:
        raise DomainError(f"degrees of freedom must be a positive integer, got {k}")


def chi2_cdf(w: float, k: int) -> float:
    """Chi-square distribution function with ``k`` degrees of freedom."""
    _check_dof(k)
    if w < 0 or math.isnan(w):
        raise DomainError(f"chi2_cdf needs w >= 0, got {w}")
    return gamma_p(0.5 * k, 0.5 * w)


def chi2_pdf(w: float, k: int) -> float:
    """Chi-square density ``w^(k/2-1) e^(-w/2) / (2^(k/2) Gamma(k/2))``."""
    _check_dof(k)
    if w < 0 or math.isnan(w):
        raise DomainError(f"chi2_pdf needs w >= 0, got {w}")
    half = 0.5 * k
    if w == 0:
        if k == 1:
            return math.inf
        return 0.5 if k == 2 else 0.0
    if math.isinf(w):
        return 0.0
    return math.exp((half - 1.0) * math.log(w) - 0.5 * w - half * math.log(2.0) - math.lgamma(half))


def chi2_quantile(q: float, k: int) -> float:
    """Inverse of :func:`chi2_cdf` by safeguarded Newton iteration.

    The Wilson-Hilferty approximation supplies the starting point; any Newton
    step that leaves the current bracket is replaced by bisection.
    """
    _check_dof(k)
    if not 0.0 < q < 1.0:
        raise DomainError(f"chi2_quantile needs 0 < q < 1, got {q}")
    lo, hi = 0.0, max(1.0, float(k))
    while chi2_cdf(hi, k) < q:
        lo, hi = hi, 2.0 * hi
    z = NormalDist().inv_cdf(q)
    h = 2.0 / (9.0 * k)
    x = k * (1.0 - h + z * math.sqrt(h)) ** 3
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for _ in range(200):
        diff = chi2_cdf(x, k) - q
        if diff == 0.0:
            return x
        if diff < 0:
            lo = x
        else:
            hi = x
        dens = chi2_pdf(x, k)
        step = diff / dens if dens > 0 and math.isfinite(dens) else math.inf
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4 * _EPS * max(x, 1e-300) or hi - lo <= 4 * _EPS * hi:
            return x_new
        x = x_new
    return x


# ---------------------------------------------------------------------------
# Incomplete beta
# ---------------------------------------------------------------------------


def _beta_cf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def beta_cdf(t: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_t(a, b)."""
    if not (a > 0 and b > 0) or not 0.0 <= t <= 1.0:
        raise DomainError(f"beta_cdf needs 0 <= t <= 1, a, b > 0; got t={t}, a={a}, b={b}")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(t) + b * math.log1p(-t)
    )
    if t < (a + 1.0) / (a + b + 2.0):
        value = math.exp(log_front) * _beta_cf(a, b, t) / a
    else:
        value = 1.0 - math.exp(log_front) * _beta_cf(b, a, 1.0 - t) / b
    return min(1.0, max(0.0, value))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 60

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21),
# non-negative half of the symmetric node set; the last node is the centre.
_XGK = (
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
)
_WGK = (
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
)
# Gauss weights attach to the odd-indexed Kronrod nodes above.
_WG = (
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
)


def _gk21(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = f(center)
    res_k = fc * _WGK[10]
    res_g = 0.0
    res_abs = abs(res_k)
    fvals = []
    for j in range(10):
        dx = half * _XGK[j]
        f1 = f(center - dx)
        f2 = f(center + dx)
        fvals.append((f1, f2))
        res_k += _WGK[j] * (f1 + f2)
        res_abs += _WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            res_g += _WG[j // 2] * (f1 + f2)
    mean = 0.5 * res_k
    res_asc = _WGK[10] * abs(fc - mean)
    for j, (f1, f2) in enumerate(fvals):
        res_asc += _WGK[j] * (abs(f1 - mean) + abs(f2 - mean))
    value = res_k * half
    res_abs *= abs(half)
    res_asc *= abs(half)
    err = abs((res_k - res_g) * half)
    # QUADPACK error scaling and round-off floor
    if res_asc != 0.0 and err != 0.0:
        err = res_asc * min(1.0, (200.0 * err / res_asc) ** 1.5)
    if res_abs > _TINY / (50.0 * _EPS):
        err = max(50.0 * _EPS * res_abs, err)
    return value, err


def adaptive_integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    full_output: bool = False,
):
    """Globally adaptive Gauss-Kronrod (21 point) integration of ``f`` on [lo, hi].

    The panel with the largest error estimate is bisected until the summed
    error drops below ``max(abs_tol, rel_tol * |result|)``.  Returns the
    estimate, or ``(estimate, error)`` when ``full_output`` is set.

    Raises :class:`IntegrationError` (carrying the best estimate) if the
    tolerance is not met within ``spec.max_subdivisions`` panels.
    """
    if lo > hi:
        raise DomainError(f"adaptive_integrate needs lo <= hi, got [{lo}, {hi}]")
    if lo == hi:
        return (0.0, 0.0) if full_output else 0.0
    value, err = _gk21(f, lo, hi)
    heap = [(-err, lo, hi, value)]
    total, total_err = value, err
    n_panels = 1
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if n_panels >= spec.max_subdivisions:
            raise IntegrationError(
                f"no convergence after {n_panels} panels (error {total_err:.3g})",
                estimate=total,
                error=total_err,
            )
        neg_err, a, b, v = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        v1, e1 = _gk21(f, a, mid)
        v2, e2 = _gk21(f, mid, b)
        heapq.heappush(heap, (-e1, a, mid, v1))
        heapq.heappush(heap, (-e2, mid, b, v2))
        n_panels += 1
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
    # re-sum to shed the drift of incremental updates
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return (total, total_err) if full_output else total


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = 1e-12

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise DomainError("bracket tolerance must be positive")


def brent_root(f: Callable[[float], float], bracket: RootBracket, max_iter: int = 200) -> float:
    """Brent's zeroin: inverse quadratic interpolation with bisection fallback."""
    a, b = bracket.lo, bracket.hi
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise BracketError(f"no sign change on [{a}, {b}]: f={fa:.3g}, {fb:.3g}")
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * bracket.tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, m)
        fb = f(b)
    return b


# ---------------------------------------------------------------------------
# Symmetric positive definite matrices
# ---------------------------------------------------------------------------


def jacobi_eigh(m, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with eigenvalues ascending and eigenvectors
    in the columns, so ``m == vectors @ diag(values) @ vectors.T``.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0 or abs(apq) <= _EPS * 1e-2 * math.sqrt(abs(a[p, p] * a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                rotated = True
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            break
    values = np.diag(a).copy()
    order = np.argsort(values)
    return values[order], v[:, order]


@dataclass(frozen=True, eq=False)
class SpdMatrix:
    """Read-only symmetric positive definite matrix with its eigen-decomposition.

    Construction rejects asymmetric input (1e-12 relative) and matrices whose
    smallest eigenvalue is not above ``1e-12`` times the largest.
    """

    entries: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DomainError(f"SpdMatrix needs a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NotPositiveDefiniteError("matrix has non-finite entries")
        scale = np.max(np.abs(arr))
        if np.max(np.abs(arr - arr.T)) > 1e-12 * scale:
            raise NotPositiveDefiniteError("matrix is not symmetric")
        arr = 0.5 * (arr + arr.T)
        vals, vecs = jacobi_eigh(arr)
        top = vals[-1]
        if top <= 0 or vals[0] <= 1e-12 * top:
            cond = top / vals[0] if vals[0] > 0 else math.inf
            raise NotPositiveDefiniteError(
                f"matrix is not positive definite (eigenvalues {vals[0]:.3g} .. {top:.3g})",
                condition=cond,
            )
        for a in (arr, vals, vecs):
            a.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def condition(self) -> float:
        return float(self.eigenvalues[-1] / self.eigenvalues[0])

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def quad(self, x) -> float:
        """Quadratic form ``x' M x``."""
        x = np.asarray(x, dtype=float)
        return float(x @ self.entries @ x)


def as_spd(m) -> SpdMatrix:
    return m if isinstance(m, SpdMatrix) else SpdMatrix(m)


def sym_sqrt(m) -> SpdMatrix:
    """Symmetric square root ``P D^(1/2) P'``."""
    m = as_spd(m)
    p = m.eigenvectors
    root = (p * np.sqrt(m.eigenvalues)) @ p.T
    return SpdMatrix(0.5 * (root + root.T))


def spd_invert(m) -> SpdMatrix:
    """Inverse of an SPD matrix via its eigen-decomposition.

    One step of iterative refinement keeps ``m @ inv`` close to the identity
    for the badly scaled Fisher matrices that unnormalized covariates produce.
    """
    m = as_spd(m)
    p = m.eigenvectors
    inv = (p / m.eigenvalues) @ p.T
    inv = inv + inv @ (np.eye(m.dim) - m.entries @ inv)
    inv = 0.5 * (inv + inv.T)
    try:
        return SpdMatrix(inv)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(
            f"inverse is numerically singular: {exc}", condition=m.condition
        ) from exc

"""Restriction regions and their reduction to the canonical (p, r, a) summary.

A region ``{x : rho(x, E) >= a}`` is described by a subspace ``E = span(Z)``
and a threshold ``a``.  Intervals in simple logistic regression map exactly
onto such a cone; rectangles and other convex hulls are covered
conservatively by the best single-direction cone around a centre ``x0``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import linprog

from .critval import GParams
from .errors import DomainError
from .numkernel import SpdMatrix, as_spd, sym_sqrt

A_CEILING = 1.0 - 1e-12
_MEMBERSHIP_SLACK = 1e-12


class RegionWarning(UserWarning):
    """Emitted when a region reduces to a degenerate summary."""


# ---------------------------------------------------------------------------
# Region variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Unrestricted:
    pass


@dataclass(frozen=True, eq=False)
class SubspaceCone:
    Z: np.ndarray
    a: float

    def __post_init__(self):
        z = np.array(self.Z, dtype=float)
        if z.ndim == 1:
            z = z[:, None]
        p, r = z.shape
        if not 1 <= r <= p:
            raise DomainError(f"Z must be p x r with 1 <= r <= p, got {z.shape}")
        if np.linalg.matrix_rank(z) < r:
            raise DomainError("columns of Z must be linearly independent")
        if not 0.0 <= self.a <= 1.0:
            raise DomainError(f"a must lie in [0, 1], got {self.a}")
        z.setflags(write=False)
        object.__setattr__(self, "Z", z)


@dataclass(frozen=True)
class IntervalCone:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError(f"interval needs lower < upper, got ({self.lower}, {self.upper})")


@dataclass(frozen=True, eq=False)
class ConvexHull:
    generators: np.ndarray
    center: np.ndarray | None = None

    def __post_init__(self):
        gens = np.atleast_2d(np.array(self.generators, dtype=float))
        k, p = gens.shape
        if k < 1 or np.any(np.all(gens == 0.0, axis=1)):
            raise DomainError("convex hull needs at least one generator, all nonzero")
        if k < p:
            raise DomainError(f"convex hull in R^{p} needs at least p={p} generators, got {k}")
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        if self.center is not None:
            center = np.array(self.center, dtype=float)
            if center.shape != (p,):
                raise DomainError(f"center must have length {p}")
            center.setflags(write=False)
            object.__setattr__(self, "center", center)

    @property
    def bounds(self) -> list[tuple[float, float]]:
        """Bounding box of the generators' free coordinates (leading 1 dropped)."""
        free = self.generators[:, 1:] / self.generators[:, :1]
        return [(float(lo), float(hi)) for lo, hi in zip(free.min(axis=0), free.max(axis=0))]


Region = Union[Unrestricted, SubspaceCone, IntervalCone, ConvexHull]


@dataclass(frozen=True, eq=False)
class RegionSummary:
    p: int
    r: int
    a: float
    x0: np.ndarray | None = None
    phi: float | None = None
    degenerate: bool = False

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise DomainError(f"a must lie in [0, 1], got {self.a}")
        if not 1 <= self.r <= self.p:
            raise DomainError(f"need 1 <= r <= p, got r={self.r}, p={self.p}")

    def gparams(self) -> GParams:
        """Critical-value parameters, with ``a`` clamped below 1."""
        return GParams(self.p, self.r, min(max(self.a, 0.0), A_CEILING))


@dataclass(frozen=True)
class SearchConfig:
    grid_points_per_dim: int = 500
    refinement_rounds: int = 2

    def __post_init__(self):
        if self.grid_points_per_dim < 2:
            raise DomainError("grid_points_per_dim must be >= 2")
        if self.refinement_rounds < 0:
            raise DomainError("refinement_rounds must be >= 0")


# ---------------------------------------------------------------------------
# Correlations
# ---------------------------------------------------------------------------


def correlation(x, z, fisher_inv) -> float:
    """Signed correlation between ``x'beta_hat`` and ``z'beta_hat``."""
    f = np.asarray(as_spd(fisher_inv).entries)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    return float((x @ f @ z) / math.sqrt((x @ f @ x) * (z @ f @ z)))


def multiple_correlation(x, Z, fisher_inv) -> float:
    """Multiple correlation between ``x'beta_hat`` and the vector ``Z'beta_hat``.

    Computed as ``sqrt(x'F Z (Z'F Z)^-1 Z'F x / x'F x)`` with ``F`` the
    inverse Fisher information.
    """
    f = as_spd(fisher_inv).entries
    x = np.asarray(x, dtype=float)
    z = np.asarray(Z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    if x.shape != (f.shape[0],) or z.shape[0] != f.shape[0]:
        raise DomainError("dimension mismatch between x, Z and fisher_inv")
    if not np.any(x):
        raise DomainError("x must be nonzero")
    if np.linalg.matrix_rank(z) < z.shape[1]:
        raise DomainError("Z is rank deficient")
    fx = f @ x
    zfx = z.T @ fx
    proj = float(zfx @ np.linalg.solve(z.T @ f @ z, zfx))
    ratio = proj / float(x @ fx)
    return math.sqrt(min(max(ratio, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Interval -> cone
# ---------------------------------------------------------------------------


def cone_from_interval(lower: float, upper: float, fisher_inv) -> RegionSummary:
    """Reduce ``lower < x < upper`` in simple logistic regression to a cone.

    With ``B`` the symmetric root of ``F^-1``, ``phi`` is the angle between
    ``B(1, lower)'`` and ``B(1, upper)'``; the cone axis ``x_a`` is the vector
    whose image bisects that angle, and ``a = cos(phi / 2)``.
    """
    if not lower < upper:
        raise DomainError(f"interval needs lower < upper, got ({lower}, {upper})")
    f = as_spd(fisher_inv)
    if f.dim != 2:
        raise DomainError(f"interval cones need a 2x2 fisher_inv, got {f.dim}x{f.dim}")
    b = sym_sqrt(f).entries
    v_lo = b @ np.array([1.0, lower])
    v_hi = b @ np.array([1.0, upper])
    e_lo = v_lo / np.linalg.norm(v_lo)
    e_hi = v_hi / np.linalg.norm(v_hi)
    # atan2 form stays accurate for nearly parallel edges
    phi = math.atan2(abs(e_lo[0] * e_hi[1] - e_lo[1] * e_hi[0]), float(e_lo @ e_hi))
    x_a = np.linalg.solve(b, e_lo + e_hi)
    x_a = x_a / x_a[0]
    return RegionSummary(p=2, r=1, a=math.cos(0.5 * phi), x0=x_a, phi=phi)


# ---------------------------------------------------------------------------
# Convex hulls: best centre search
# ---------------------------------------------------------------------------


def rect_generators(bounds, p: int | None = None) -> list[np.ndarray]:
    """Corners ``(1, c_1, ..., c_{p-1})`` of a box, last coordinate varying fastest."""
    bounds = [tuple(map(float, b)) for b in bounds]
    if not bounds:
        raise DomainError("rect_generators needs at least one bound pair")
    if p is not None and len(bounds) != p - 1:
        raise DomainError(f"need p-1={p - 1} bound pairs, got {len(bounds)}")
    for lo, hi in bounds:
        if not lo < hi:
            raise DomainError(f"bound needs lo < hi, got ({lo}, {hi})")
    return [np.array((1.0, *corner)) for corner in itertools.product(*bounds)]


def _min_corr_on_grid(axes, gens, f, chunk=1 << 18):
    """Score ``max(0, min_i rho(x_i, x0))`` for x0 = (1, grid point), C order."""
    fg = gens @ f  # k x p, rows are (F x_i)'
    gnorm = np.sqrt(np.einsum("ij,ij->i", fg, gens))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    out = np.empty(mesh.shape[0])
    for start in range(0, mesh.shape[0], chunk):
        pts = mesh[start:start + chunk]
        x0 = np.concatenate([np.ones((pts.shape[0], 1)), pts], axis=1)
        q0 = np.sqrt(np.einsum("ij,jk,ik->i", x0, f, x0))
        rho = (x0 @ fg.T) / (q0[:, None] * gnorm[None, :])
        out[start:start + chunk] = np.maximum(rho.min(axis=1), 0.0)
    return out, mesh


def _axes(bounds, n):
    return [np.linspace(lo, hi, n) if hi > lo else np.array([lo]) for lo, hi in bounds]


def _full_grid(bounds, gens, f, n):
    scores, mesh = _min_corr_on_grid(_axes(bounds, n), gens, f)
    best = int(np.argmax(scores))  # first max = lowest lexicographic index
    return mesh[best], float(scores[best])


def _coordinate_descent(bounds, gens, f, n, start, max_sweeps=50):
    axes = _axes(bounds, n)
    point = np.array(start, dtype=float)
    score = _min_corr_on_grid([[v] for v in point], gens, f)[0][0]
    for _ in range(max_sweeps):
        improved = False
        for j, axis in enumerate(axes):
            trial = [[v] for v in point]
            trial[j] = axis
            scores, mesh = _min_corr_on_grid(trial, gens, f)
            best = int(np.argmax(scores))
            if scores[best] > score:
                point, score, improved = mesh[best].copy(), float(scores[best]), True
        if not improved:
            break
    return point, score


def best_center_search(generators, fisher_inv, bounds, config: SearchConfig = SearchConfig()) -> RegionSummary:
    """Grid search for the centre ``x0`` maximizing ``min_i rho(x_i, x0)``.

    ``x0 = (1, h_1, ..., h_{p-1})`` ranges over the box ``bounds``.  Negative
    minimum correlations score 0.  Up to three free coordinates are searched on
    the full product grid; beyond that, coordinate-descent sweeps over the same
    per-coordinate grids replace it.  Each refinement round re-grids a box a
    tenth the size of the previous one around the incumbent.

    If every candidate scores 0 the summary has ``a = 0`` and
    ``degenerate=True`` (the Scheffe value then applies).
    """
    f = as_spd(fisher_inv)
    gens = np.atleast_2d(np.array(generators, dtype=float))
    p = f.dim
    if gens.shape[1] != p:
        raise DomainError(f"generators must have length {p}")
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    if len(bounds) != p - 1:
        raise DomainError(f"need p-1={p - 1} bound pairs, got {len(bounds)}")
    if any(hi < lo for lo, hi in bounds):
        raise DomainError("each bound needs lo <= hi")
    fm = np.asarray(f.entries)
    n = config.grid_points_per_dim

    def search(box, start):
        if len(box) <= 3:
            return _full_grid(box, gens, fm, n)
        return _coordinate_descent(box, gens, fm, n, start)

    center = np.array([0.5 * (lo + hi) for lo, hi in bounds])
    point, score = search(bounds, center)
    box = bounds
    for _ in range(config.refinement_rounds):
        box = [
            (max(lo0, v - 0.05 * (hi - lo)), min(hi0, v + 0.05 * (hi - lo)))
            for v, (lo, hi), (lo0, hi0) in zip(point, box, bounds)
        ]
        cand, cand_score = search(box, point)
        if cand_score > score:
            point, score = cand, cand_score

    x0 = np.concatenate([[1.0], point])
    a = max(0.0, min(correlation(g, x0, f) for g in gens))
    if a == 0.0:
        warnings.warn("no centre gives positive correlation with every generator", RegionWarning, stacklevel=2)
    return RegionSummary(p=p, r=1, a=a, x0=x0, degenerate=a == 0.0)


# ---------------------------------------------------------------------------
# Membership and summaries
# ---------------------------------------------------------------------------


def contains(region: Region, x, fisher_inv) -> bool:
    """Whether ``x`` lies in ``region``."""
    f = as_spd(fisher_inv)
    x = np.asarray(x, dtype=float)
    if x.shape != (f.dim,):
        raise DomainError(f"x must have length {f.dim}, got shape {x.shape}")
    if isinstance(region, Unrestricted):
        return True
    if isinstance(region, SubspaceCone):
        if region.Z.shape[0] != f.dim:
            raise DomainError("Z and fisher_inv dimensions differ")
        fm = f.entries
        fx = fm @ x
        zfx = region.Z.T @ fx
        lhs = float(zfx @ np.linalg.solve(region.Z.T @ fm @ region.Z, zfx))
        rhs = region.a ** 2 * float(x @ fx)
        return lhs >= rhs - _MEMBERSHIP_SLACK * abs(rhs)
    if isinstance(region, IntervalCone):
        if f.dim != 2:
            raise DomainError("interval regions need a 2-parameter model")
        return bool(np.isclose(x[0], 1.0, rtol=0, atol=1e-12) and region.lower <= x[1] <= region.upper)
    if isinstance(region, ConvexHull):
        gens = region.generators
        if gens.shape[1] != f.dim:
            raise DomainError("generator and fisher_inv dimensions differ")
        k = gens.shape[0]
        a_eq = np.vstack([gens.T, np.ones((1, k))])
        b_eq = np.concatenate([x, [1.0]])
        res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
        return bool(res.status == 0)
    raise DomainError(f"unknown region type {type(region).__name__}")


def summarize(region: Region, fisher_inv, config: SearchConfig = SearchConfig()) -> RegionSummary:
    """Canonical ``(p, r, a)`` summary of any region variant."""
    f = as_spd(fisher_inv)
    p = f.dim
    if isinstance(region, Unrestricted):
        return RegionSummary(p=p, r=p, a=0.0)
    if isinstance(region, SubspaceCone):
        if region.Z.shape[0] != p:
            raise DomainError("Z and fisher_inv dimensions differ")
        return RegionSummary(p=p, r=region.Z.shape[1], a=float(region.a))
    if isinstance(region, IntervalCone):
        return cone_from_interval(region.lower, region.upper, f)
    if isinstance(region, ConvexHull):
        if region.center is not None:
            a = max(0.0, min(correlation(g, region.center, f) for g in region.generators))
            return RegionSummary(p=p, r=1, a=a, x0=region.center, degenerate=a == 0.0)
        return best_center_search(region.generators, f, region.bounds, config)
    raise DomainError(f"unknown region type {type(region).__name__}")


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------


def region_from_json(obj: dict) -> Region:
    """Parse ``{"type": "unrestricted" | "interval" | "rectangle" | "subspace", ...}``.

    ``{"type": "hull", "generators": [[...], ...]}`` is accepted as well for
    convex hulls that are not boxes.
    """
    kind = obj.get("type")
    try:
        if kind == "unrestricted":
            return Unrestricted()
        if kind == "interval":
            return IntervalCone(float(obj["lower"]), float(obj["upper"]))
        if kind == "rectangle":
            bounds = obj["bounds"]
            return ConvexHull(np.array(rect_generators(bounds)), obj.get("center"))
        if kind == "subspace":
            return SubspaceCone(np.array(obj["Z"], dtype=float), float(obj["a"]))
        if kind == "hull":
            return ConvexHull(np.array(obj["generators"], dtype=float), obj.get("center"))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed {kind} region: {exc}") from exc
    raise DomainError(f"unknown region type {kind!r}")


def region_to_json(region: Region) -> dict:
    if isinstance(region, Unrestricted):
        return {"type": "unrestricted"}
    if isinstance(region, IntervalCone):
        return {"type": "interval", "lower": region.lower, "upper": region.upper}
    if isinstance(region, SubspaceCone):
        return {"type": "subspace", "Z": region.Z.tolist(), "a": region.a}
    if isinstance(region, ConvexHull):
        corners = np.array(rect_generators(region.bounds))
        if corners.shape == region.generators.shape and np.array_equal(corners, region.generators):
            out = {"type": "rectangle", "bounds": [list(b) for b in region.bounds]}
        else:
            out = {"type": "hull", "generators": region.generators.tolist()}
        if region.center is not None:
            out["center"] = region.center.tolist()
        return out
    raise DomainError(f"unknown region type {type(region).__name__}")

"""Simultaneous bands on the linear-predictor and probability scales."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .critval import CriticalValue
from .errors import DomainError
from .glm import FittedModel, linear_predictor_se, logistic
from .regions import Region, Unrestricted, contains


class OutsideRegionWarning(UserWarning):
    """Band evaluated at a point the simultaneous guarantee does not cover."""


@dataclass(frozen=True)
class BandSpec:
    model: FittedModel
    critical: CriticalValue
    region: Region = Unrestricted()

    def __post_init__(self):
        if self.critical.params.p != self.model.p:
            raise DomainError(
                f"critical value is for p={self.critical.params.p}, model has p={self.model.p}"
            )


@dataclass(frozen=True, eq=False)
class BandPoint:
    x: np.ndarray
    eta_hat: float
    se: float
    lin_lo: float
    lin_hi: float
    p_lo: float
    p_hi: float
    in_region: bool = True


def band_at(x, spec: BandSpec) -> BandPoint:
    """Band ``x'beta_hat +/- c se(x)`` and its image under the logistic function.

    Points outside the region are still evaluated but trigger an
    :class:`OutsideRegionWarning`.
    """
    x = np.asarray(x, dtype=float)
    model = spec.model
    if x.shape != (model.p,):
        raise DomainError(f"x must have length {model.p}, got shape {x.shape}")
    inside = contains(spec.region, x, model.fisher_inv)
    if not inside:
        warnings.warn(f"x={x.tolist()} lies outside the band's region", OutsideRegionWarning, stacklevel=2)
    eta = float(x @ model.beta_hat)
    se = linear_predictor_se(x, model)
    half = spec.critical.c * se
    lin_lo, lin_hi = eta - half, eta + half
    return BandPoint(
        x=x,
        eta_hat=eta,
        se=se,
        lin_lo=lin_lo,
        lin_hi=lin_hi,
        p_lo=logistic(lin_lo),
        p_hi=logistic(lin_hi),
        in_region=inside,
    )


def band_curve(spec: BandSpec, grid) -> list[BandPoint]:
    grid = [np.asarray(x, dtype=float) for x in grid]
    if not grid:
        raise DomainError("band_curve needs a nonempty grid")
    return [band_at(x, spec) for x in grid]


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

_VALUE_COLUMNS = ("eta_hat", "se", "lin_lo", "lin_hi", "p_lo", "p_hi")


def band_to_csv(points: list[BandPoint]) -> str:
    """CSV with columns ``x1..x{p-1}, eta_hat, se, lin_lo, lin_hi, p_lo, p_hi``.

    Floats are written with ``repr`` so the file round-trips exactly.
    """
    p = points[0].x.shape[0]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{i}" for i in range(1, p)] + list(_VALUE_COLUMNS))
    for pt in points:
        writer.writerow([repr(float(v)) for v in pt.x[1:]] + [repr(float(getattr(pt, c))) for c in _VALUE_COLUMNS])
    return buf.getvalue()


def band_from_csv(text: str) -> list[BandPoint]:
    reader = csv.DictReader(io.StringIO(text))
    xcols = [c for c in reader.fieldnames or [] if c not in _VALUE_COLUMNS]
    out = []
    for row in reader:
        x = np.array([1.0] + [float(row[c]) for c in xcols])
        out.append(BandPoint(x=x, **{c: float(row[c]) for c in _VALUE_COLUMNS}))
    return out


def band_to_records(points: list[BandPoint]) -> list[dict]:
    records = []
    for pt in points:
        rec = asdict(pt)
        rec["x"] = pt.x.tolist()
        records.append(rec)
    return records


def band_from_records(records: list[dict]) -> list[BandPoint]:
    return [BandPoint(**{**rec, "x": np.array(rec["x"], dtype=float)}) for rec in records]

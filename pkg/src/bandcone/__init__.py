"""Simultaneous confidence bands for logistic regression over restricted predictor regions."""

from .bands import BandPoint, BandSpec, band_at, band_curve
from .critval import CriticalValue, GParams, cdf_G, critical_value, oracle_cdf_G
from .errors import (
    BandconeError,
    ConvergenceError,
    DesignError,
    DomainError,
    NotPositiveDefiniteError,
    NumericalError,
)
from .glm import Dataset, FittedModel, fit_logistic, logistic
from .mcsim import CoverageReport, SimulationCell, simulate_alphas, simulate_cell
from .regions import (
    ConvexHull,
    IntervalCone,
    RegionSummary,
    SearchConfig,
    SubspaceCone,
    Unrestricted,
    best_center_search,
    cone_from_interval,
    multiple_correlation,
    summarize,
)

__version__ = "0.1.0"

"""Stationarity, autocorrelation, correlation, and error metrics.

All functions are pure and operate on plain 1-D float arrays. They back both
the transform pipeline (stationarity and periodicity checks before training)
and the per-representation profile table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstantSeriesError,
    LagOutOfRangeError,
    LengthMismatchError,
    SeriesTooShortError,
    SingularRegressionError,
    ZeroVarianceError,
)

# Large-sample MacKinnon critical values for the constant-only unit-root
# regression. Desk-scale series are long enough for the asymptotic values.
ADF_CRITICAL_VALUES = {"1%": -3.43, "5%": -2.86, "10%": -2.57}


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lags_used: int
    stationary: bool
    critical_value_5pct: float = ADF_CRITICAL_VALUES["5%"]


def acf(values: np.ndarray, m: int) -> float:
    """Lag-m autocorrelation.

    Ratio of the lag-m autocovariance to the variance, both around the
    full-series mean. The numerator sums the n - m overlapping terms; the
    lag-0 value is exactly 1.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise SeriesTooShortError("acf needs a 1-D series of length >= 2")
    n = x.size
    if not 0 <= m < n:
        raise LagOutOfRangeError(f"lag {m} outside [0, {n})")
    centered = x - x.mean()
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise ConstantSeriesError("acf undefined for a constant series")
    if m == 0:
        return 1.0
    num = float(np.dot(centered[m:], centered[:-m]))
    return num / denom


def peak_acf(values: np.ndarray, max_lag: int | None = None) -> tuple[float, int]:
    """Profile-table autocorrelation summary: (max acf, argmax lag).

    Scans lags 1..L with L = min(40, len // 4) by default; the peak exposes
    the dominant periodicity strength for the sortable profile bars.
    """
    x = np.asarray(values, dtype=np.float64)
    limit = min(40, x.size // 4) if max_lag is None else max_lag
    if limit < 1:
        raise SeriesTooShortError("series too short for an acf summary")
    best_lag = 1
    best = -np.inf
    for lag in range(1, limit + 1):
        value = acf(x, lag)
        if value > best:
            best, best_lag = value, lag
    return best, best_lag


def adf_lag_order(n: int) -> int:
    """Schwert rule of thumb: floor(12 * (n/100)^(1/4))."""
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def adf_test(values: np.ndarray) -> AdfResult:
    """Unit-root test: OLS of the first difference on a constant, the lagged
    level, and p lagged differences, with p from :func:`adf_lag_order`.

    The statistic is the t-ratio of the lagged-level coefficient; the series
    counts as stationary when it falls below the 5% critical value.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.size < 20:
        raise SeriesTooShortError("adf test needs at least 20 observations")
    n = x.size
    p = adf_lag_order(n)
    dx = np.diff(x)
    rows = n - 1 - p
    ncols = 2 + p
    if rows <= ncols:
        raise SeriesTooShortError(f"only {rows} usable rows for {ncols} regressors")

    # Row for time i (i = p+1 .. n-1): dx[i-1] ~ 1 + x[i-1] + dx[i-2..i-1-p].
    y = dx[p:]
    design = np.empty((rows, ncols))
    design[:, 0] = 1.0
    design[:, 1] = x[p:-1]
    for j in range(1, p + 1):
        design[:, 1 + j] = dx[p - j : n - 1 - j]

    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < ncols:
        raise SingularRegressionError("degenerate design matrix (constant series?)")
    resid = y - design @ beta
    sigma2 = float(resid @ resid) / (rows - ncols)
    cov = sigma2 * np.linalg.inv(design.T @ design)
    se = math.sqrt(cov[1, 1])
    if se == 0.0:
        raise SingularRegressionError("zero standard error on the level coefficient")
    statistic = float(beta[1] / se)
    crit = ADF_CRITICAL_VALUES["5%"]
    return AdfResult(statistic=statistic, lags_used=p, stationary=statistic < crit)


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation coefficient in [-1, 1].

    Evaluated in centered form, algebraically identical to the raw-sums
    product-moment formula but stable for large offsets.
    """
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(y, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatchError(f"shapes {a.shape} and {b.shape} differ")
    if a.size < 2:
        raise SeriesTooShortError("pearson needs length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    va = float(da @ da)
    vb = float(db @ db)
    if va == 0.0 or vb == 0.0:
        raise ZeroVarianceError("pearson undefined for a constant input")
    r = float(da @ db) / math.sqrt(va * vb)
    return min(1.0, max(-1.0, r))


def rmse(predicted: np.ndarray, actual: np.ndarray) -> float:
    """Root mean squared difference; 0 iff the sequences are identical."""
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape:
        raise LengthMismatchError(f"shapes {p.shape} and {a.shape} differ")
    if p.size == 0:
        raise LengthMismatchError("rmse needs at least one element")
    diff = (p - a).ravel()
    return math.sqrt(float(diff @ diff) / diff.size)

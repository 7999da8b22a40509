"""Least-squares power-law fits on log-log data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = ["FitResult", "fit_power_law", "fit_linear"]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    r2: float


def fit_linear(x, y) -> FitResult:
    """Ordinary least squares ``y ~ slope * x + intercept``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 3:
        raise ValueError("need at least 3 matched points")
    if np.ptp(y) == 0:
        return FitResult(0.0, float(y[0]), 0.0, 1.0)
    res = stats.linregress(x, y)
    return FitResult(float(res.slope), float(res.intercept), float(res.stderr), float(res.rvalue**2))


def fit_power_law(pairs, min_points: int = 3) -> FitResult:
    """Slope of ``log y`` against ``log x``.

    Parameters
    ----------
    pairs : iterable of (x, y)
        Positive data.
    min_points : int
        Minimum number of points; sweeps in the harness use at least 4.

    Examples
    --------
    >>> round(fit_power_law([(2, 4), (4, 16), (8, 64)]).slope, 12)
    2.0
    """
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[0] < min_points:
        raise ValueError(f"need at least {min_points} (x, y) pairs")
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("power-law fit needs finite positive data")
    return fit_linear(np.log(arr[:, 0]), np.log(arr[:, 1]))

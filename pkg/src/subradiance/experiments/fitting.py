"""Log-log power-law fits, with parity-aware variants for oscillating series."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import FitError


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r2: float
    n_points: int

    def __iter__(self):
        return iter((self.slope, self.intercept, self.r2))

    def predict(self, n):
        return math.exp(self.intercept) * np.asarray(n, dtype=float) ** self.slope


def _window(points, window):
    pts = sorted((float(n), float(v)) for n, v in points)
    if window is not None:
        lo, hi = window
        pts = [(n, v) for n, v in pts if lo <= n <= hi]
    return pts


def fit_power_law(points, window=None) -> PowerLawFit:
    """Least-squares line through (log N, log value).

    Non-positive values inside the window are dropped with a warning; fewer
    than three survivors is a ``FitError``.
    """
    pts = _window(points, window)
    keep = [(n, v) for n, v in pts if v > 0 and n > 0]
    if len(keep) < len(pts):
        warnings.warn(f"dropped {len(pts) - len(keep)} non-positive points from power-law fit",
                      RuntimeWarning, stacklevel=2)
    if len(keep) < 3:
        raise FitError(f"need >= 3 positive points, have {len(keep)}")
    x = np.log([n for n, _ in keep])
    y = np.log([v for _, v in keep])
    res = stats.linregress(x, y)
    return PowerLawFit(float(res.slope), float(res.intercept), float(res.rvalue**2), len(keep))


def parity_average(points):
    """Mean of each consecutive (N, N+1) pair, placed at N + 1/2."""
    pts = dict(sorted((int(n), float(v)) for n, v in points))
    return [(n + 0.5, 0.5 * (v + pts[n + 1])) for n, v in pts.items() if n + 1 in pts]


def parity_aware_fit(points, window=None) -> dict:
    """Separate fits on even-N and odd-N subsequences and on the
    parity-averaged series.  Entries that cannot be fitted are ``None``."""
    out = {}
    pts = [(int(n), v) for n, v in points]
    subsets = {
        "even": [(n, v) for n, v in pts if n % 2 == 0],
        "odd": [(n, v) for n, v in pts if n % 2 == 1],
        "averaged": parity_average(pts),
    }
    for key, sub in subsets.items():
        try:
            out[key] = fit_power_law(sub, window)
        except FitError:
            out[key] = None
    return out

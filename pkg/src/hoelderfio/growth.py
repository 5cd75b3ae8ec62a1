"""Log-log growth exponents."""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

__all__ = ["GrowthFit", "fit_growth_exponent", "DEFAULT_FIT_RANGE"]

DEFAULT_FIT_RANGE = (4.0, 256.0)


@dataclass
class GrowthFit:
    slope: float
    intercept: float
    stderr_slope: float
    points: list = field(default_factory=list)
    fit_range: tuple = DEFAULT_FIT_RANGE

    def to_json(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr_slope,
            "points": [list(p) for p in self.points],
            "fit_range": list(self.fit_range),
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def fit_growth_exponent(points, fit_range=DEFAULT_FIT_RANGE):
    """Least-squares slope of ``log(value)`` against ``log(1 + |y|)``.

    ``points`` are ``(|y|, value)`` pairs; those with ``|y|`` inside
    ``fit_range`` (inclusive) are used, and there must be at least four.
    """
    lo, hi = float(fit_range[0]), float(fit_range[1])
    if lo < 2.0:
        raise ValueError("fit range must start at |y| >= 2")
    if hi <= lo:
        raise ValueError("empty fit range")
    used = [(abs(float(y)), float(v)) for y, v in points if lo <= abs(float(y)) <= hi]
    if len(used) < 4:
        raise ValueError(f"need at least 4 points inside {fit_range}, got {len(used)}")
    if any(not v > 0 or not math.isfinite(v) for _, v in used):
        raise ValueError("growth values must be positive and finite")
    x = np.log1p([y for y, _ in used])
    z = np.log([v for _, v in used])
    res = stats.linregress(x, z)
    stderr = float(res.stderr) if np.isfinite(res.stderr) else 0.0
    pts = [(float(a), float(b)) for a, b in zip(x, z)]
    return GrowthFit(float(res.slope), float(res.intercept), stderr, pts, (lo, hi))

"""Smooth steps, plateau cutoffs and interval plateaus built from ``exp(-1/t)``."""

import numpy as np


def _flat_exp(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``, monotone in between."""
    num = _flat_exp(t)
    return num / (num + _flat_exp(1.0 - np.asarray(t, dtype=float)))


def plateau(r, radius=1.0):
    """Radial plateau: 1 for ``r <= radius``, 0 for ``r >= 2 * radius``."""
    r = np.abs(np.asarray(r, dtype=float))
    return smooth_step((2.0 * radius - r) / radius)


def interval_plateau(u, lo, hi, ramp=0.25):
    """Flat-top bump supported exactly in ``[lo, hi]``.

    Equals 1 on the inner part of the interval and rises/falls over a
    fraction ``ramp`` of the interval length at each end.
    """
    u = np.asarray(u, dtype=float)
    w = ramp * (hi - lo)
    return smooth_step((u - lo) / w) * smooth_step((hi - u) / w)


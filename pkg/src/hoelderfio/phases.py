"""Radial phases ``phi(u) = beta(|u|) u`` and checks of their derivative bounds."""

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .cutoffs import plateau

__all__ = [
    "PhaseSpec",
    "HypothesisReport",
    "L2Hypotheses",
    "eval_phi_tilde",
    "rescaled_phase",
    "verify_hoelder_hypotheses",
    "verify_l2_hypotheses",
    "phase_lipschitz",
    "diffeo_psi",
    "diffeo_psi_prime_max",
]

KINDS = ("constant", "hoelder_power", "smooth_diffeo", "custom")


def diffeo_psi(u):
    """Odd compactly supported perturbation ``u exp(-1/(1-u^2))``."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = ui * np.exp(-1.0 / (1.0 - ui * ui))
    return out


def _diffeo_psi_prime(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    s = 1.0 - u[inside] ** 2
    out[inside] = np.exp(-1.0 / s) * (1.0 - 2.0 * u[inside] ** 2 / s**2)
    return out


@functools.lru_cache(maxsize=None)
def diffeo_psi_prime_max():
    """``max |psi'|``; the global max sits on the negative lobe."""
    grid = np.linspace(0.0, 0.999, 20001)
    i = int(np.argmax(np.abs(_diffeo_psi_prime(grid))))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda t: -abs(float(_diffeo_psi_prime(np.array([t]))[0])),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(-res.fun)


@dataclass(frozen=True)
class PhaseSpec:
    """A radial phase family.

    ``custom`` phases carry an ``evaluator`` mapping points of shape
    ``(..., d)`` to ``phi(u)`` of the same shape.  It must be stateless and of
    the radial form ``beta(|u|) u``; ``linear_radius`` (if given) promises
    ``phi(u) = a u`` beyond that radius.
    """

    kind: str
    a: float = 1.0
    b: float = 0.0
    gamma: float = 1.0
    cutoff_radius: float = 1.0
    perturbation_amplitude: float = 0.0
    evaluator: Optional[Callable] = None
    custom_linear_radius: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown phase kind {self.kind!r}")
        if self.kind == "hoelder_power":
            if not -1.0 < self.gamma <= 1.0:
                raise ValueError(f"gamma must lie in (-1, 1], got {self.gamma}")
            if not self.cutoff_radius > 0:
                raise ValueError("cutoff_radius must be positive")
        if self.kind == "smooth_diffeo":
            if self.a != 1.0:
                raise ValueError("smooth_diffeo phases are the identity outside [-1, 1]; a must be 1")
            if abs(self.perturbation_amplitude) * diffeo_psi_prime_max() > 0.5 + 1e-12:
                raise ValueError("|c| max|psi'| must not exceed 1/2")
        if self.kind == "custom" and self.evaluator is None:
            raise ValueError("custom phases need an evaluator")

    # constructors -----------------------------------------------------

    @classmethod
    def constant(cls, a=1.0):
        return cls("constant", a=a, gamma=1.0)

    @classmethod
    def hoelder_power(cls, a=1.0, b=1.0, gamma=0.5, cutoff_radius=1.0):
        return cls("hoelder_power", a=a, b=b, gamma=gamma, cutoff_radius=cutoff_radius)

    @classmethod
    def smooth_diffeo(cls, c=None):
        if c is None:
            c = 0.5 / diffeo_psi_prime_max()
        return cls("smooth_diffeo", a=1.0, gamma=1.0, perturbation_amplitude=c)

    @classmethod
    def custom(cls, evaluator, a=0.0, gamma=1.0, linear_radius=None):
        return cls("custom", a=a, gamma=gamma, evaluator=evaluator, custom_linear_radius=linear_radius)

    # evaluation -------------------------------------------------------

    def beta(self, r):
        """Radial multiplier ``beta(r)``, ``r > 0``."""
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.full_like(r, self.a)
        if self.kind == "hoelder_power":
            with np.errstate(divide="ignore"):
                power = np.where(r > 0, np.abs(r) ** self.gamma, 0.0)
            return self.a + self.b * plateau(r, self.cutoff_radius) * power
        if self.kind == "smooth_diffeo":
            return 1.0 + self.perturbation_amplitude * diffeo_psi(r) / np.where(r > 0, r, 1.0)
        pts = np.zeros(r.shape + (1,))
        pts[..., 0] = r
        return np.asarray(self.evaluator(pts))[..., 0] / np.where(r > 0, r, 1.0)

    def radial_map(self, r):
        """``r beta(r)``, the action of the phase along a ray."""
        r = np.asarray(r, dtype=float)
        if self.kind == "hoelder_power":
            with np.errstate(divide="ignore"):
                power = np.where(r > 0, np.abs(r) ** (self.gamma + 1.0), 0.0)
            return self.a * r + self.b * plateau(r, self.cutoff_radius) * power
        if self.kind == "smooth_diffeo":
            return r + self.perturbation_amplitude * diffeo_psi(r)
        return self.beta(r) * r

    def phi_tilde(self, u):
        """Evaluate on points of shape ``(..., d)``."""
        u = np.asarray(u, dtype=float)
        if self.kind == "custom":
            out = np.asarray(self.evaluator(u), dtype=float)
            if not np.all(np.isfinite(out)):
                raise ValueError("custom phase evaluator returned non-finite values")
            return out
        r = np.sqrt((u * u).sum(axis=-1))
        # radial_map(r) u / r without dividing by zero at the origin
        scale = np.where(r > 0, self.radial_map(r) / np.where(r > 0, r, 1.0), 0.0)
        return scale[..., None] * u

    def phi_on_mesh(self, mesh):
        """``phi`` on broadcastable per-axis coordinate arrays; returns a list of components."""
        r = np.sqrt(sum(c * c for c in mesh))
        if self.kind == "custom":
            full = np.stack(np.broadcast_arrays(*mesh), axis=-1)
            out = self.phi_tilde(full)
            return [out[..., i] for i in range(len(mesh))]
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(r > 0, self.radial_map(r) / np.where(r > 0, r, 1.0), 0.0)
        return [scale * c for c in mesh]

    def beta_at_zero(self):
        """``lim_{r -> 0+} beta(r)``, the slope of the linear part at the origin."""
        if self.kind == "hoelder_power":
            if self.gamma > 0:
                return self.a
            return self.a + self.b if self.gamma == 0 else math.nan
        if self.kind == "smooth_diffeo":
            return 1.0 + self.perturbation_amplitude * math.exp(-1.0)
        return float(self.beta(np.array([1e-12]))[0])

    def linear_radius(self):
        """Radius beyond which ``phi(u) = a u`` exactly, or None if unknown."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "hoelder_power":
            return 2.0 * self.cutoff_radius if self.b != 0 else 0.0
        if self.kind == "smooth_diffeo":
            return 1.0
        return self.custom_linear_radius

    # serialization ----------------------------------------------------

    def to_json(self):
        if self.kind == "custom":
            raise ValueError("custom phases are library-only and cannot be serialized")
        return {
            "kind": self.kind,
            "a": self.a,
            "b": self.b,
            "gamma": self.gamma,
            "cutoff_radius": self.cutoff_radius,
            "perturbation_amplitude": self.perturbation_amplitude,
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind") == "custom":
            raise ValueError("custom phases cannot be loaded from JSON")
        keys = ("kind", "a", "b", "gamma", "cutoff_radius", "perturbation_amplitude")
        kw = {k: obj[k] for k in keys if k in obj}
        if kw.get("kind") == "smooth_diffeo" and "perturbation_amplitude" not in kw:
            kw["perturbation_amplitude"] = 0.5 / diffeo_psi_prime_max()
        return cls(**kw)


def eval_phi_tilde(phase, u):
    """``phi(u)`` for a single point (or an array of points along the last axis)."""
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    out = phase.phi_tilde(np.atleast_1d(u))
    return float(out[0]) if scalar else out


def rescaled_phase(phase, y, gamma):
    """The dilated phase ``u -> 2 pi phi(u / |y|^(1/(gamma+1))) . y`` (radians).

    Only defined for ``|y| >= 1``.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    ny = float(np.linalg.norm(y))
    if ny < 1.0:
        raise ValueError(f"rescaling needs |y| >= 1, got {ny}")
    scale = ny ** (1.0 / (gamma + 1.0))

    def b_y(u):
        # points along the last axis; in 1-D a plain array of scalars is accepted
        u = np.asarray(u, dtype=float)
        if y.size == 1:
            flat = u.reshape(-1, 1)
            return 2.0 * math.pi * (phase.phi_tilde(flat / scale)[:, 0] * y[0]).reshape(u.shape)
        return 2.0 * math.pi * (phase.phi_tilde(u / scale) @ y)

    return b_y


@functools.lru_cache(maxsize=256)
def phase_lipschitz(phase, r_max=None):
    """Empirical ``sup |D phi|`` over the radial profile.

    For radial phases the Jacobian has eigenvalues ``beta(r)`` (tangential)
    and ``(r beta)'(r)`` (radial), so the sup of their moduli is the operator
    norm bound used by the grid policy.
    """
    lin = phase.linear_radius()
    if r_max is None:
        r_max = 2.0 * lin if lin else 8.0
    r = np.unique(np.concatenate([np.geomspace(1e-8, r_max, 4000), np.linspace(0, r_max, 20001)[1:]]))
    rm = phase.radial_map(r)
    slope = np.gradient(rm, r)
    tangential = np.abs(phase.beta(r))
    L = float(max(np.max(np.abs(slope)), np.max(tangential), abs(phase.a)))
    return max(L, 1e-12)


def radial_slope_range(phase, r_max=None):
    """Min and max of ``(r beta)'`` on a dense radial mesh."""
    lin = phase.linear_radius()
    if r_max is None:
        r_max = 2.0 * lin if lin else 8.0
    r = np.unique(np.concatenate([np.geomspace(1e-8, r_max, 4000), np.linspace(0, r_max, 20001)[1:]]))
    slope = np.gradient(phase.radial_map(r), r)
    return float(min(slope.min(), phase.a)), float(max(slope.max(), phase.a))


# ---------------------------------------------------------------------------
# hypothesis verification


@dataclass
class HypothesisReport:
    order_checked: int
    worst_ratio_small_u: float
    worst_bound_large_u: float
    samples_used: int
    passed: bool
    gamma_checked: float
    decade_sups: list
    decade_growth: float
    ceiling: float


def _partial(f, u, axes, step):
    """Nested central differences; ``axes`` lists the differentiation directions."""
    if not axes:
        return f(u)
    e = np.zeros(u.shape[-1])
    e[axes[0]] = 1.0
    h = step[..., None] * e
    return (_partial(f, u + h, axes[1:], step) - _partial(f, u - h, axes[1:], step)) / (2.0 * step[..., None])


def _multi_indices(dim, order):
    """Sorted axis tuples of length ``order`` (one per multi-index)."""
    return list(itertools.combinations_with_replacement(range(dim), order))


def verify_hoelder_hypotheses(
    phase,
    max_order=None,
    sample_count=2000,
    seed=0,
    dim=1,
    gamma=None,
    subtract_linear=True,
    ceiling=1e5,
    growth_limit=2.0,
):
    """Probe ``|D^a phi(u)| <= C |u|^(gamma+1-|a|)`` near 0 and ``|D^a phi| <= C'`` far out.

    With ``subtract_linear`` the linear part ``beta(0+) u`` is removed first,
    which is the reduction that lets phases with ``beta(0+) != 0`` qualify.  Small
    radii are log-uniform in ``[1e-4, 1]`` and checked for orders
    ``0..max_order`` (default ``floor(d/2)+1``); large radii are uniform in
    ``[1, 8]`` and checked for orders ``2..2*max_order``.

    The check passes when both worst figures stay below ``ceiling`` and the
    per-decade sup of the small-|u| ratios does not grow toward the origin
    by more than ``growth_limit``.
    """
    if gamma is None:
        gamma = phase.gamma
    l = dim // 2 + 1 if max_order is None else int(max_order)
    if l < 1:
        raise ValueError("max_order must be >= 1")
    rng = np.random.default_rng(seed)

    def directions(n):
        v = rng.standard_normal((n, dim))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    if subtract_linear:
        slope0 = phase.beta_at_zero()
        if not math.isfinite(slope0):
            slope0 = 0.0

        def f(u):
            return phase.phi_tilde(u) - slope0 * u
    else:
        f = phase.phi_tilde

    r_small = 10.0 ** rng.uniform(-4.0, 0.0, sample_count)
    u_small = r_small[:, None] * directions(sample_count)
    r_large = rng.uniform(1.0, 8.0, sample_count)
    u_large = r_large[:, None] * directions(sample_count)

    ratios = np.zeros(sample_count)
    for order in range(0, l + 1):
        step = np.maximum(r_small, 0.01) * np.finfo(float).eps ** (1.0 / (order + 2))
        step = np.minimum(step, 0.5 * r_small)
        for axes in _multi_indices(dim, order):
            d = _partial(f, u_small, list(axes), step)
            mag = np.linalg.norm(d, axis=-1)
            ratios = np.maximum(ratios, mag / r_small ** (gamma + 1.0 - order))

    bounds = np.zeros(sample_count)
    for order in range(2, 2 * l + 1):
        step = r_large * np.finfo(float).eps ** (1.0 / (order + 2))
        for axes in _multi_indices(dim, order):
            d = _partial(f, u_large, list(axes), step)
            bounds = np.maximum(bounds, np.linalg.norm(d, axis=-1))

    if not (np.all(np.isfinite(ratios)) and np.all(np.isfinite(bounds))):
        raise FloatingPointError("non-finite difference quotient (sample too close to a singularity)")

    decade = np.clip(np.floor(np.log10(r_small)).astype(int), -4, -1)
    sups = [float(ratios[decade == k].max()) if np.any(decade == k) else 0.0 for k in (-4, -3, -2, -1)]
    positive = [s for s in sups if s > 0]
    growth = sups[0] / min(positive) if positive and sups[0] > 0 else 1.0
    worst_small = float(ratios.max())
    worst_large = float(bounds.max())
    passed = worst_small <= ceiling and worst_large <= ceiling and growth <= growth_limit
    return HypothesisReport(
        order_checked=l,
        worst_ratio_small_u=worst_small,
        worst_bound_large_u=worst_large,
        samples_used=2 * sample_count,
        passed=bool(passed),
        gamma_checked=float(gamma),
        decade_sups=sups,
        decade_growth=float(growth),
        ceiling=float(ceiling),
    )


@dataclass
class L2Hypotheses:
    beta_inf: float
    slope_min: float
    slope_max: float

    def conditions_hold(self):
        """Positive branch of the L^2 sufficient conditions (see the signed variant for the other)."""
        return self.beta_inf > 0 and self.slope_min > 0

    @property
    def delta(self):
        return self.beta_inf

    @property
    def b1(self):
        return self.slope_min


def verify_l2_hypotheses(phase, r_min=1e-4, r_max=1.0, samples=2000):
    """Empirical ``inf beta`` and the range of ``d/dr (r beta(r))`` on a log mesh."""
    if not 0 < r_min < r_max:
        raise ValueError("need 0 < r_min < r_max")
    r = np.geomspace(r_min, r_max, samples)
    step = r * np.finfo(float).eps ** (1.0 / 3.0)
    slope = (phase.radial_map(r + step) - phase.radial_map(r - step)) / (2.0 * step)
    beta = phase.beta(r)
    return L2Hypotheses(float(beta.min()), float(slope.min()), float(slope.max()))


def verify_l2_hypotheses_signed(phase, r_min=1e-4, r_max=1.0, samples=2000):
    """Return ``(record, sign)`` where sign is +1/-1 for the branch that holds, else 0.

    The negative branch (``beta <= delta < 0`` and slopes in ``[B1, B2]``, both
    negative) is checked by negating the measured quantities.
    """
    rec = verify_l2_hypotheses(phase, r_min, r_max, samples)
    r = np.geomspace(r_min, r_max, samples)
    beta_sup = float(phase.beta(r).max())
    if rec.beta_inf > 0 and rec.slope_min > 0:
        return rec, 1
    if beta_sup < 0 and rec.slope_max < 0:
        return rec, -1
    return rec, 0

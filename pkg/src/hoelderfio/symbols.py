"""Radial symbols ``Phi(u) = h(|u|)``: the collision-type family, plateau bumps, Gaussians."""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cutoffs import plateau
from .grid import FREQUENCY, SampledFunction

__all__ = ["SymbolSpec", "eval_symbol", "sample_symbol", "m1_admissible"]

KINDS = ("phiex", "bump", "gaussian", "custom")

# Gaussian tails are cut where Phi < 1e-12 * max
_GAUSS_CUT = math.sqrt(12.0 * math.log(10.0) / math.pi)


@dataclass(frozen=True)
class SymbolSpec:
    """A radial symbol.

    ``custom`` symbols carry an ``evaluator`` from points ``(..., d)`` to
    values ``(...)``; ``support_radius`` is then read as the radius outside
    which the evaluator is (numerically) zero.
    """

    kind: str
    m: float = 2.0
    support_radius: float = 1.0
    width: float = 1.0
    evaluator: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "phiex" and not self.m > 0:
            raise ValueError("phiex needs m > 0")
        if not self.support_radius > 0 or not self.width > 0:
            raise ValueError("support_radius and width must be positive")
        if self.kind == "custom" and self.evaluator is None:
            raise ValueError("custom symbols need an evaluator")

    @classmethod
    def phiex(cls, m=2.0):
        return cls("phiex", m=m)

    @classmethod
    def bump(cls, support_radius=1.0):
        return cls("bump", support_radius=support_radius)

    @classmethod
    def gaussian(cls, width=1.0):
        return cls("gaussian", width=width)

    @classmethod
    def custom(cls, evaluator, support_radius=1.0):
        return cls("custom", support_radius=support_radius, evaluator=evaluator)

    def profile(self, r):
        """``h(r)`` with ``Phi(u) = h(|u|)``."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.kind == "phiex":
            return r / (1.0 + r * r) ** self.m
        if self.kind == "bump":
            return plateau(r, self.support_radius)
        if self.kind == "gaussian":
            return np.exp(-math.pi * r * r / self.width**2)
        pts = np.zeros(r.shape + (1,))
        pts[..., 0] = r
        return self._checked(self.evaluator(pts))

    def _checked(self, out):
        out = np.asarray(out, dtype=float)
        if not np.all(np.isfinite(out)):
            raise ValueError("custom symbol evaluator returned non-finite values")
        return out

    def evaluate(self, u):
        """``Phi`` on points of shape ``(..., d)``."""
        u = np.asarray(u, dtype=float)
        if self.kind == "custom":
            return self._checked(self.evaluator(u))
        return self.profile(np.sqrt((u * u).sum(axis=-1)))

    def on_mesh(self, mesh):
        """``Phi`` on broadcastable per-axis coordinate arrays."""
        if self.kind == "custom":
            full = np.stack(np.broadcast_arrays(*mesh), axis=-1)
            return self.evaluate(full)
        return self.profile(np.sqrt(sum(c * c for c in mesh)))

    @property
    def sup_norm(self):
        if self.kind == "phiex":
            if self.m <= 0.5:
                return math.inf
            r = 1.0 / math.sqrt(2.0 * self.m - 1.0)
            return r / (1.0 + r * r) ** self.m
        if self.kind in ("bump", "gaussian"):
            return 1.0
        r = np.linspace(0.0, 2.0 * self.support_radius, 4001)
        return float(np.abs(self.profile(r)).max())

    @property
    def slow_decay(self):
        """True when the symbol has no usable truncation radius."""
        return self.kind == "phiex"

    def truncation_radius(self):
        """Radius beyond which ``Phi < 1e-12 max`` (None for slowly decaying symbols)."""
        if self.kind == "bump":
            return 2.0 * self.support_radius
        if self.kind == "gaussian":
            return _GAUSS_CUT * self.width
        if self.kind == "custom":
            return self.support_radius
        return None

    def kernel_width(self):
        """Rough half-width of the effective support of the inverse transform of ``Phi``."""
        if self.kind == "gaussian":
            return 4.0 / self.width
        if self.kind == "bump":
            return 8.0 / self.support_radius
        if self.kind == "phiex":
            return 32.0
        return 16.0

    def to_json(self):
        if self.kind == "custom":
            raise ValueError("custom symbols cannot be serialized")
        return {"kind": self.kind, "m": self.m, "support_radius": self.support_radius, "width": self.width}

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind") == "custom":
            raise ValueError("custom symbols cannot be loaded from JSON")
        return cls(**{k: obj[k] for k in ("kind", "m", "support_radius", "width") if k in obj})


def eval_symbol(symbol, u):
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        return float(symbol.evaluate(u.reshape(1, 1))[0])
    if u.ndim == 1:
        return float(symbol.evaluate(u[None, :])[0])
    return symbol.evaluate(u)


def sample_symbol(symbol, grid):
    """Point samples of ``Phi`` on a (frequency) grid."""
    return SampledFunction(grid, symbol.on_mesh(grid.mesh()), FREQUENCY)


def m1_admissible(symbol, dim):
    """Sufficient-condition certificate for membership in the Feichtinger algebra."""
    if symbol.kind == "phiex":
        return symbol.m > (dim + 1) / 2.0
    if symbol.kind in ("bump", "gaussian"):
        return True
    raise ValueError("membership of a custom symbol cannot be certified")

"""Uniform centered grids, sampled functions and continuum-normalized FFTs.

A :class:`Grid` samples the cube ``[-R, R)^d`` with ``N`` points per axis.
Its dual grid (frequency side) has spacing ``1/(2R)`` and half-extent
``N/(4R)``, so that ``forward_ft`` approximates

    f_hat(u) = int f(t) exp(-2 pi i t.u) dt

by ``h^d`` times a centered DFT.
"""

import csv
import os
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft

__all__ = [
    "Grid",
    "SampledFunction",
    "GridError",
    "SpaceTagError",
    "make_grid",
    "max_points",
    "forward_ft",
    "inverse_ft",
    "l1_norm",
    "weighted_l1_norm",
    "l2_norm",
    "save_binary",
    "load_binary",
    "save_csv",
]

BUDGET_ENV = "HOELDERFIO_MAX_POINTS"
DEFAULT_MAX_POINTS = 2**24

POSITION = "position"
FREQUENCY = "frequency"
_TAGS = {POSITION: 0, FREQUENCY: 1}


class GridError(ValueError):
    pass


class SpaceTagError(ValueError):
    pass


def max_points():
    """Total sample budget, read from ``$HOELDERFIO_MAX_POINTS``."""
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_MAX_POINTS


def _is_pow2(n):
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class Grid:
    dim: int
    points_per_axis: int
    half_extent: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise GridError(f"dim must be 1, 2 or 3, got {self.dim}")
        n = self.points_per_axis
        if int(n) != n or not _is_pow2(int(n)) or n < 8:
            raise GridError(f"points_per_axis must be a power of two >= 8, got {n}")
        if not self.half_extent > 0:
            raise GridError(f"half_extent must be positive, got {self.half_extent}")
        total = int(n) ** self.dim
        if total > max_points():
            raise GridError(
                f"grid of {total} points exceeds the memory budget of {max_points()} "
                f"(set ${BUDGET_ENV} to raise it)"
            )

    @property
    def spacing(self):
        return 2.0 * self.half_extent / self.points_per_axis

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    @property
    def size(self):
        return self.points_per_axis**self.dim

    def axis(self):
        n = self.points_per_axis
        return (np.arange(n) - n // 2) * self.spacing

    def mesh(self):
        """Coordinate arrays, one per axis, broadcastable to ``shape``."""
        ax = self.axis()
        return np.meshgrid(*([ax] * self.dim), indexing="ij", sparse=True)

    def points(self):
        """All nodes as an ``(size, dim)`` array in row-major order."""
        full = np.meshgrid(*([self.axis()] * self.dim), indexing="ij")
        return np.stack([c.ravel() for c in full], axis=-1)

    def radius(self):
        r2 = sum(c * c for c in self.mesh())
        return np.sqrt(r2)

    def dual(self):
        n = self.points_per_axis
        return Grid(self.dim, n, n / (4.0 * self.half_extent))

    def index_of(self, x):
        """Nearest node index (per axis) of a point."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.rint(x / self.spacing).astype(int) + self.points_per_axis // 2
        return tuple(np.clip(idx, 0, self.points_per_axis - 1))


def make_grid(dim, points_per_axis, half_extent):
    return Grid(int(dim), int(points_per_axis), float(half_extent))


@dataclass(frozen=True)
class SampledFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)
    space_tag: str = POSITION

    def __post_init__(self):
        if self.space_tag not in _TAGS:
            raise SpaceTagError(f"unknown space tag {self.space_tag!r}")
        vals = np.array(self.values, dtype=complex)
        if vals.size != self.grid.size:
            raise GridError(f"expected {self.grid.size} samples, got {vals.size}")
        vals = vals.reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("sampled function contains non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, fn, grid, space_tag=POSITION):
        """Sample ``fn(*coords)`` on the grid (coords broadcast per axis)."""
        return cls(grid, np.broadcast_to(fn(*grid.mesh()), grid.shape), space_tag)

    def with_values(self, values):
        return SampledFunction(self.grid, values, self.space_tag)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same(self, other)
        return self.with_values(self.values - other.values)


def _check_same(f, g):
    if f.grid != g.grid or f.space_tag != g.space_tag:
        raise GridError("functions live on different grids")


def _require(f, tag):
    if f.space_tag != tag:
        raise SpaceTagError(f"expected a {tag}-space function, got {f.space_tag}")


def forward_ft(f, workers=None):
    """Continuous Fourier transform approximated on the dual grid."""
    _require(f, POSITION)
    g = f.grid
    axes = tuple(range(g.dim))
    v = sp_fft.fftshift(
        sp_fft.fftn(sp_fft.ifftshift(f.values, axes=axes), axes=axes, workers=workers),
        axes=axes,
    )
    return SampledFunction(g.dual(), v * g.spacing**g.dim, FREQUENCY)


def inverse_ft(f, workers=None):
    _require(f, FREQUENCY)
    g = f.grid
    axes = tuple(range(g.dim))
    v = sp_fft.fftshift(
        sp_fft.ifftn(sp_fft.ifftshift(f.values, axes=axes), axes=axes, workers=workers),
        axes=axes,
    )
    # ifftn divides by N^d; the continuum inverse needs du^d * N^d
    return SampledFunction(g.dual(), v * (g.spacing * g.points_per_axis) ** g.dim, POSITION)


def l1_norm(f):
    return float(f.grid.spacing**f.grid.dim * np.abs(f.values).sum())


def weighted_l1_norm(f, s):
    """L^1 norm with weight ``(1 + |x|)^s``."""
    if s < 0:
        raise ValueError("weight exponent must be nonnegative")
    w = (1.0 + f.grid.radius()) ** s
    return float(f.grid.spacing**f.grid.dim * (w * np.abs(f.values)).sum())


def l2_norm(f):
    a = np.abs(f.values)
    return float(np.sqrt(f.grid.spacing**f.grid.dim * (a * a).sum()))


_HEADER = struct.Struct("<IQdB")


def save_binary(f, path):
    """Write ``f`` as: header ``<dim:u32, N:u64, R:f64, tag:u8>`` then re/im f64 pairs."""
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.dim, g.points_per_axis, g.half_extent, _TAGS[f.space_tag]))
        inter = np.empty(2 * g.size, dtype="<f8")
        flat = f.values.ravel()
        inter[0::2] = flat.real
        inter[1::2] = flat.imag
        fh.write(inter.tobytes())


def load_binary(path):
    with open(path, "rb") as fh:
        dim, n, r, tag = _HEADER.unpack(fh.read(_HEADER.size))
        data = np.frombuffer(fh.read(), dtype="<f8")
    grid = make_grid(dim, n, r)
    if data.size != 2 * grid.size:
        raise GridError(f"{path}: expected {2 * grid.size} doubles, found {data.size}")
    space = {v: k for k, v in _TAGS.items()}[tag]
    return SampledFunction(grid, data[0::2] + 1j * data[1::2], space)


def save_csv(f, path):
    """Coordinates, real and imaginary parts, one node per row."""
    pts = f.grid.points()
    names = ["x"] if f.grid.dim == 1 else [f"x{i}" for i in range(f.grid.dim)]
    flat = f.values.ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["re", "im"])
        for p, v in zip(pts, flat):
            w.writerow([f"{c:.12g}" for c in p] + [f"{v.real:.12g}", f"{v.imag:.12g}"])

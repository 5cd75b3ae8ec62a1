"""Short-time Fourier transforms on lattices and the mixed norms built from them (d=1).

``V_g f(z, xi) = int f(t) g(t - z) exp(-2 pi i xi t) dt``, evaluated for each
window position ``z`` on the window's local segment with a chirp z-transform,
so the frequency lattice is independent of the sampling grid.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, signal
from scipy.interpolate import CubicSpline

from .cutoffs import plateau
from .grid import POSITION, GridError, SampledFunction, SpaceTagError
from .growth import DEFAULT_FIT_RANGE, fit_growth_exponent
from .phases import phase_lipschitz
from .symbols import SymbolSpec

__all__ = [
    "Window",
    "STFTMatrix",
    "stft",
    "modulation_norm",
    "amalgam_norm",
    "m1_norm",
    "check_dilation",
    "chirp_amalgam_growth",
    "chirp_amalgam_norms",
    "homogeneous_stft_decay",
    "write_stft_csv",
]


@dataclass(frozen=True)
class Window:
    """Unit-L^2 analysis window: ``gaussian`` (``2^(1/4) exp(-pi t^2 / s^2) / sqrt(s)``) or a plateau ``bump``."""

    kind: str = "gaussian"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "bump"):
            raise ValueError(f"unknown window {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("window scale must be positive")

    @property
    def half_width(self):
        """Radius outside which the window is below 1e-20 (or exactly zero)."""
        return 3.9 * self.scale if self.kind == "gaussian" else 2.0 * self.scale

    @property
    def effective_width(self):
        return self.scale

    def __call__(self, t):
        t = np.asarray(t, dtype=float) / self.scale
        if self.kind == "gaussian":
            return 2.0**0.25 * np.exp(-math.pi * t * t) / math.sqrt(self.scale)
        return plateau(t, 1.0) / math.sqrt(_BUMP_L2 * self.scale)

    def descriptor(self):
        return f"{self.kind}(scale={self.scale:g})"


def _bump_l2():
    t = np.linspace(-2.0, 2.0, 400001)
    return float(integrate.trapezoid(plateau(t, 1.0) ** 2, t))


_BUMP_L2 = _bump_l2()


@dataclass
class STFTMatrix:
    x_nodes: np.ndarray
    xi_nodes: np.ndarray
    values: np.ndarray = field(repr=False)
    x_step: float
    xi_step: float
    window_id: str

    def transposed(self):
        """Exchange the roles of the two lattice axes."""
        return STFTMatrix(self.xi_nodes, self.x_nodes, self.values.T, self.xi_step, self.x_step, self.window_id)


def _lattice(lo, hi, step):
    """Integer multiples of ``step`` inside ``[lo, hi]``."""
    j0, j1 = math.ceil(lo / step - 1e-9), math.floor(hi / step + 1e-9)
    return np.arange(j0, j1 + 1) * step


def stft(f, window=None, x_step=0.5, xi_step=0.5, x_range=None, xi_max=None):
    """``V_g f`` on the lattice ``x_step Z x xi_step Z`` (truncated).

    Window positions default to every lattice node that keeps the window's
    support inside the grid; ``xi_max`` defaults to the grid's Nyquist
    frequency.
    """
    window = window or Window()
    if f.space_tag != POSITION:
        raise SpaceTagError("stft needs a position-space function")
    g = f.grid
    if g.dim != 1:
        raise GridError("the time-frequency module works in d=1")
    if x_step > 0.5 * window.effective_width or xi_step > 0.5 / window.effective_width:
        raise ValueError(
            f"lattice ({x_step:g}, {xi_step:g}) violates the oversampling rule: "
            f"steps must not exceed {0.5 * window.effective_width:g} and {0.5 / window.effective_width:g}"
        )
    h = g.spacing
    hw = window.half_width
    if x_range is None:
        x_range = (-g.half_extent + hw, g.half_extent - h - hw)
    if x_range[0] - hw < -g.half_extent - 1e-12 or x_range[1] + hw > g.half_extent - h + 1e-12:
        raise GridError("window positions must keep the window inside the grid")
    z = _lattice(x_range[0], x_range[1], x_step)
    nyq = 1.0 / (2.0 * h)
    xi_max = nyq if xi_max is None else min(float(xi_max), nyq)
    xi = _lattice(-xi_max, xi_max, xi_step)
    if z.size == 0 or xi.size == 0:
        raise GridError("empty lattice")

    n = g.points_per_axis
    m = int(round(2 * hw / h)) + 1
    start = np.rint((z - hw) / h).astype(int) + n // 2
    idx = start[:, None] + np.arange(m)[None, :]
    t = (idx - n // 2) * h
    seg = f.values[idx] * window(t - z[:, None])
    # sum_k seg_k exp(-2 pi i xi_m (t0 + k h)), xi_m = xi_0 + m dxi
    w = np.exp(-2j * math.pi * xi_step * h)
    a = np.exp(2j * math.pi * xi[0] * h)
    core = signal.czt(seg, m=xi.size, w=w, a=a, axis=-1)
    t0 = t[:, 0]
    vals = h * core * np.exp(-2j * math.pi * t0[:, None] * xi[None, :])
    return STFTMatrix(z, xi, vals, float(x_step), float(xi_step), window.descriptor())


def _lp(arr, p, weight, axis):
    a = np.abs(arr)
    if math.isinf(p):
        return a.max(axis=axis)
    if p < 1:
        raise ValueError("exponents must lie in [1, inf]")
    return (weight * (a**p).sum(axis=axis)) ** (1.0 / p)


def modulation_norm(S, p, q):
    """Inner ``L^p`` over window positions, outer ``L^q`` over frequencies."""
    inner = _lp(S.values, p, S.x_step, axis=0)
    return float(_lp(inner, q, S.xi_step, axis=0))


def amalgam_norm(S, p, q):
    """Inner ``L^p`` over frequencies, outer ``L^q`` over window positions."""
    inner = _lp(S.values, p, S.xi_step, axis=1)
    return float(_lp(inner, q, S.x_step, axis=0))


def m1_norm(f, window=None, edge_tolerance=1e-8, **lattice):
    """``M^{1,1}`` norm; refuses functions that have not decayed at the grid edge."""
    v = np.abs(f.values)
    peak = float(v.max())
    if peak == 0:
        return 0.0
    band = max(1, f.grid.points_per_axis // 64)
    edge = max(float(v[:band].max()), float(v[-band:].max()))
    if edge > edge_tolerance * peak:
        raise GridError(
            f"function is {edge / peak:.2e} of its peak at the grid edge (needs < {edge_tolerance:g}); enlarge R"
        )
    return modulation_norm(stft(f, window, **lattice), 1.0, 1.0)


def _as_callable(f):
    """Samples of ``f(lam x)`` on ``f``'s grid from a callable or by spline resampling."""
    if callable(f):
        return f
    ax = f.grid.axis()
    re = CubicSpline(ax, f.values.real, extrapolate=False)
    im = CubicSpline(ax, f.values.imag, extrapolate=False)
    return lambda x: np.nan_to_num(re(x)) + 1j * np.nan_to_num(im(x))


def check_dilation(f, lambdas, p, q, grid=None, window=None, **lattice):
    """``[(lam, ||f_lam|| / (lam^(1/p - 1/q) ||f||))]`` in ``W(FL^p, L^q)``.

    ``f`` is a callable (evaluated on ``grid``) or a position-space sample.
    """
    if isinstance(f, SampledFunction):
        grid = f.grid
    if grid is None:
        raise ValueError("a grid is needed for callable inputs")
    fn = _as_callable(f)
    inv = lambda e: 0.0 if math.isinf(e) else 1.0 / e

    def norm(lam):
        vals = fn(lam * grid.axis())
        return amalgam_norm(stft(SampledFunction(grid, vals), window, **lattice), p, q)

    base = norm(1.0)
    out = []
    for lam in lambdas:
        if lam < 1:
            raise ValueError("dilation factors must be >= 1")
        ratio = 1.0 if lam == 1 else norm(lam) / (lam ** (inv(p) - inv(q)) * base)
        out.append((float(lam), float(ratio)))
    return out


def chirp_amalgam_norms(phase, y_magnitudes, truncation, window=None, margin=8.0):
    """``||exp(-2 pi i phi(u) y)||_{W(FL^1, L^inf)}`` on the truncation grid for each ``|y|``.

    Windows sit on ``|u| <= R - half_width``.  A chirp whose local frequency
    ``|y| sup|D phi|`` exceeds half the grid's Nyquist rate is refused.
    """
    window = window or Window()
    L = phase_lipschitz(phase, truncation.half_extent)
    nyq = 1.0 / (2.0 * truncation.spacing)
    u = truncation.axis()
    out = []
    for mag in y_magnitudes:
        need = 2.0 * mag * L + margin
        if need > nyq:
            n_need = 2 ** math.ceil(math.log2(4.0 * truncation.half_extent * need))
            raise GridError(f"chirp at |y|={mag:g} is aliased on this grid; requires N >= {n_need}")
        vals = np.exp(-2j * math.pi * phase.phi_tilde(u[:, None])[:, 0] * mag)
        S = stft(SampledFunction(truncation, vals), window, xi_max=mag * L + margin)
        out.append((float(mag), amalgam_norm(S, 1.0, math.inf)))
    return out


def chirp_amalgam_growth(phase, y_magnitudes, truncation, fit_range=DEFAULT_FIT_RANGE, window=None):
    """Growth exponent of the chirp's amalgam norm against ``1 + |y|``."""
    pts = chirp_amalgam_norms(phase, y_magnitudes, truncation, window)
    return fit_growth_exponent(pts, fit_range)


def homogeneous_stft_decay(degree, grid, cutoff=None, xi_shells=(4, 8, 16, 32, 64, 128), window=None, profile=None):
    """Max over window positions of ``|V_g(h chi)(x, xi)|`` per frequency shell.

    ``h(x) = |x|^degree`` and ``chi`` the cutoff symbol's profile (default a
    plateau bump).  ``profile`` replaces ``h chi`` outright (used for
    comparison functions).  Returns ``(shells, fitted exponent)``; the fit is
    against ``log(1 + |xi|)``.
    """
    if degree <= 0 and profile is None:
        raise ValueError("degree must be positive")
    cutoff = cutoff or SymbolSpec.bump(1.0)
    x = grid.axis()
    vals = profile(x) if profile is not None else np.abs(x) ** degree * cutoff.profile(x)
    f = SampledFunction(grid, vals)
    shells = []
    for s in xi_shells:
        S = stft(f, window, x_range=(-4.0, 4.0), xi_max=s + 0.25)
        col = np.argmin(np.abs(S.xi_nodes - s))
        shells.append((float(s), float(np.abs(S.values[:, col]).max())))
    xs = np.log1p([s for s, _ in shells])
    ys = np.log([max(v, 1e-300) for _, v in shells])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return shells, slope


def write_stft_csv(S, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "xi", "abs_v"])
        for i, z in enumerate(S.x_nodes):
            for j, k in enumerate(S.xi_nodes):
                w.writerow([f"{z:.12g}", f"{k:.12g}", f"{abs(S.values[i, j]):.12g}"])

"""The collision-type operator: kernel slices, Schur integrals, warp application and L^2 probes.

The kernel is

    K(x, y) = int Phi(u) exp(-2 pi i (phi(u).y - u.x)) du,

the inverse Fourier transform of ``u -> Phi(u) exp(-2 pi i phi(u).y)``, and the
operator is ``A f = F^-1[Phi(u) f_hat(phi(u))]``, i.e. ``A f(x) = int K(x, y) f(y) dy``.
"""

import csv
import functools
import itertools
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, sparse
from scipy.interpolate import CubicSpline

from .cutoffs import interval_plateau
from .grid import (
    FREQUENCY,
    POSITION,
    GridError,
    SampledFunction,
    SpaceTagError,
    forward_ft,
    inverse_ft,
    l1_norm,
    l2_norm,
    make_grid,
    max_points,
)
from .phases import phase_lipschitz

__all__ = [
    "GridPolicy",
    "KernelSlice",
    "QuadratureWarning",
    "WarpOperator",
    "WarpStats",
    "ProbePlan",
    "OperatorProbe",
    "resolve_grid",
    "synthesize_kernel_slice",
    "direct_quadrature_kernel",
    "direct_schur_value",
    "schur_curve",
    "schur_slices",
    "apply_operator",
    "oracle_l2_identity",
    "concentration_family",
    "gabor_atom",
    "power_iteration",
    "l2_probe",
    "write_schur_csv",
    "write_profile_csv",
    "write_sidecar",
]


class QuadratureWarning(RuntimeWarning):
    pass


def _next_pow2(x):
    return 2 ** max(0, math.ceil(math.log2(max(x, 1.0))))


@dataclass(frozen=True)
class GridPolicy:
    """How kernel slices pick their grids.

    Leave ``points_per_axis`` and ``half_extent`` unset for the automatic
    policy.  With both set the grid is fixed and any violation of the
    sampling rules is refused.  ``images`` is the number of periodic images
    added on each side when folding a slowly decaying symbol.
    """

    points_per_axis: Optional[int] = None
    half_extent: Optional[float] = None
    min_freq_half_extent: float = 8.0
    images: int = 64
    tail_tolerance: float = 0.005
    max_doublings: int = 6

    @property
    def explicit(self):
        return self.points_per_axis is not None and self.half_extent is not None

    def to_json(self):
        return {
            "points_per_axis": self.points_per_axis,
            "half_extent": self.half_extent,
            "min_freq_half_extent": self.min_freq_half_extent,
            "images": self.images,
            "tail_tolerance": self.tail_tolerance,
        }


@dataclass
class GridChoice:
    points_per_axis: int
    half_extent: float
    freq_half_extent: float
    lipschitz: float
    folded: bool

    def to_json(self):
        return {
            "N": self.points_per_axis,
            "R": self.half_extent,
            "U": self.freq_half_extent,
            "lipschitz": self.lipschitz,
            "folded": self.folded,
        }


@dataclass
class KernelSlice:
    y: np.ndarray
    kernel: SampledFunction = field(repr=False)
    grid_policy_used: GridChoice
    schur_value: float
    shell_fraction: float


def _required_freq_extent(phase, symbol, dim, policy):
    """Smallest admissible frequency half-extent and whether folding is used."""
    lin = phase.linear_radius()
    if symbol.slow_decay:
        if lin is None:
            raise GridError("a slowly decaying symbol needs a phase with a known linear radius")
        u_req = max(policy.min_freq_half_extent, 2.0 * lin)
        if dim == 1:
            return u_req, True
        # no folding in d >= 2: the truncated mass itself must be negligible
        m = symbol.m
        if 2 * m - 1 - dim <= 0:
            raise GridError("symbol is not integrable in this dimension")
        # tail of r^(1-2m) r^(d-1) beyond U relative to O(1) total mass
        u_mass = (1e8 / (2 * m - 1 - dim)) ** (1.0 / (2 * m - 1 - dim))
        return max(u_req, u_mass), False
    trunc = symbol.truncation_radius()
    return max(policy.min_freq_half_extent, trunc), False


def resolve_grid(phase, symbol, y, dim=1, policy=None):
    """Pick ``(N, R)`` for a slice at ``y`` or refuse an explicit grid that is too coarse."""
    policy = policy or GridPolicy()
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.size != dim:
        raise ValueError(f"y has {y.size} components, expected {dim}")
    ny = float(np.linalg.norm(y))
    u_req, folded = _required_freq_extent(phase, symbol, dim, policy)
    L = phase_lipschitz(phase, max(u_req, 2.0 * (phase.linear_radius() or 0.0), 1.0))
    r_req = max(2.0 * ny * L, ny * L + symbol.kernel_width() + 8.0)
    if policy.explicit:
        n, r = int(policy.points_per_axis), float(policy.half_extent)
        u = n / (4.0 * r)
        if u < u_req or r < 2.0 * ny * L:
            r_need = max(r, _next_pow2(2.0 * ny * L))
            u_need = max(u, _next_pow2(u_req))
            n_need = int(4 * r_need * u_need)
            raise GridError(
                f"grid (N={n}, R={r}) is too coarse for |y|={ny:g}: "
                f"chirp resolution requires N >= {n_need} with R >= {r_need:g}"
            )
        return GridChoice(n, r, u, L, folded)
    u = float(_next_pow2(u_req))
    r = float(_next_pow2(r_req))
    if policy.half_extent is not None:
        r = max(r, float(policy.half_extent))
    n = int(4 * r * u)
    if n**dim > max_points():
        raise GridError(f"|y|={ny:g} requires N={n} per axis, beyond the memory budget")
    return GridChoice(n, r, u, L, folded)


def _modulated_symbol(phase, symbol, y, freq_grid, folded, images):
    mesh = freq_grid.mesh()
    comps = phase.phi_on_mesh(mesh)
    dot = sum(c * yi for c, yi in zip(comps, y))
    vals = symbol.on_mesh(mesh) * np.exp(-2j * math.pi * dot)
    if folded:
        # periodic images: beyond the linear radius phi(u) = a u exactly
        u = mesh[0]
        period = 2.0 * freq_grid.half_extent
        for k in range(1, images + 1):
            for s in (k, -k):
                v = u + s * period
                vals = vals + symbol.profile(v) * np.exp(-2j * math.pi * phase.a * v * y[0])
    return vals


def _shell_fraction(kernel, schur):
    g = kernel.grid
    if schur == 0:
        return 0.0
    mesh = g.mesh()
    outer = np.zeros(g.shape, dtype=bool)
    for c in mesh:
        outer = outer | (np.abs(c) >= g.half_extent / 2.0)
    shell = g.spacing**g.dim * np.abs(kernel.values[outer]).sum()
    return float(shell / schur)


def synthesize_kernel_slice(phase, symbol, y, policy=None, dim=None, workers=1):
    """``K(., y)`` on a position grid chosen by ``policy``.

    The Schur integral is certified by requiring the mass in the outer dyadic
    shell to be below ``policy.tail_tolerance`` of the total; the automatic
    policy doubles ``R`` until it is.
    """
    policy = policy or GridPolicy()
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dim = y.size if dim is None else dim
    choice = resolve_grid(phase, symbol, y, dim, policy)
    for _ in range(policy.max_doublings + 1):
        pos = make_grid(dim, choice.points_per_axis, choice.half_extent)
        freq = pos.dual()
        vals = _modulated_symbol(phase, symbol, y, freq, choice.folded, policy.images)
        kernel = inverse_ft(SampledFunction(freq, vals, FREQUENCY), workers=workers)
        schur = l1_norm(kernel)
        frac = _shell_fraction(kernel, schur)
        if frac < policy.tail_tolerance:
            return KernelSlice(y, kernel, choice, schur, frac)
        if policy.explicit:
            raise GridError(
                f"kernel at |y|={np.linalg.norm(y):g} leaks {100 * frac:.2f}% of its mass into the outer "
                f"shell of R={choice.half_extent:g}; requires N >= {2 * choice.points_per_axis} "
                f"with R >= {2 * choice.half_extent:g}"
            )
        n2 = 2 * choice.points_per_axis
        if n2**dim > max_points():
            raise GridError(f"tail certification at |y|={np.linalg.norm(y):g} needs N={n2}, beyond the budget")
        choice = GridChoice(n2, 2 * choice.half_extent, choice.freq_half_extent, choice.lipschitz, choice.folded)
    raise GridError(f"tail certification failed after {policy.max_doublings} doublings")


# ---------------------------------------------------------------------------
# direct quadrature


def _quadrature_radius(phase, symbol):
    if symbol.slow_decay:
        return max(phase.linear_radius() or 0.0, 1.0)
    return symbol.truncation_radius()


def _tail_integral(symbol, z, T):
    """``2 int_T^inf Phi(u) cos(2 pi u z) du`` for an even 1-D symbol."""
    f = symbol.profile
    if abs(z) < 1e-14:
        val, _ = integrate.quad(lambda u: float(f(u)), T, np.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
    else:
        val, _ = integrate.quad(
            lambda u: float(f(u)), T, np.inf, weight="cos", wvar=2.0 * math.pi * z,
            epsabs=1e-13, limlst=200, limit=400,
        )
    return 2.0 * val


def _profile_slope(symbol, r):
    """``h'(r)``, one-sided at ``r = 0`` where an even profile may have a kink."""
    d = 1e-6 * max(1.0, r)
    if r == 0:
        h = symbol.profile(np.array([0.0, d, 2 * d]))
        return float((-3 * h[0] + 4 * h[1] - h[2]) / (2 * d))
    h = symbol.profile(np.array([r - d, r + d]))
    return float((h[1] - h[0]) / (2 * d))


def direct_quadrature_kernel(phase, symbol, x, y, refinement=1, rtol=1e-6, chunk=1 << 22):
    """Brute-force trapezoid value of ``K(x, y)``.

    In d=1 ``x`` may be an array of positions sharing one ``y``.  The rule
    runs on ``[-T, T]`` (with ``u = 0`` a node) at four nested step sizes
    and returns the finest; slowly decaying symbols get the exact linear-phase
    tail beyond ``T`` from an oscillatory Fourier integral.  The leading
    Euler-Maclaurin terms are removed: the kink of the profile at ``u = 0``
    (as in ``|u| / (1 + u^2)^m``) and, for those tails, the cut at ``+-T``
    where the integrand is known in closed form.  A
    :class:`QuadratureWarning` flags values whose last halving moved them by
    more than ``rtol`` of the symbol's L^1 mass.
    """
    if refinement < 1:
        raise ValueError("refinement must be >= 1")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dim = y.size
    T = _quadrature_radius(phase, symbol)
    L = phase_lipschitz(phase, max(T, 1.0))
    if dim > 1:
        return _direct_nd(phase, symbol, np.asarray(x, dtype=float), y, T, L, refinement, rtol)
    if symbol.slow_decay and (phase.linear_radius() is None or phase.linear_radius() > T):
        raise ValueError("tail correction needs a linear phase beyond the quadrature radius")
    xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    scalar = np.ndim(x) == 0
    yv = float(y[0])
    h0 = 1.0 / (8.0 * (np.abs(xs).max() + abs(yv) * L + 1.0)) / refinement
    n = 8 * math.ceil(T / h0)
    u = np.linspace(-T, T, 2 * n + 1)
    du = u[1] - u[0]
    base = symbol.profile(u) * np.exp(-2j * math.pi * phase.phi_tilde(u[:, None])[:, 0] * yv)
    scale = float(np.abs(base).sum() * du) or 1.0
    kink = _profile_slope(symbol, 0.0)
    if symbol.slow_decay:
        hT, dhT = float(symbol.profile(np.array([T]))[0]), _profile_slope(symbol, T)
    out = np.empty(xs.size, dtype=complex)
    per = max(1, chunk // u.size)
    bad = 0
    for start in range(0, xs.size, per):
        xc = xs[start:start + per]
        integrand = base[None, :] * np.exp(2j * math.pi * xc[:, None] * u[None, :])
        # g'(T) - g'(-T) for g(u) = h(u) exp(-2 pi i c u), the form beyond T
        jump = 0.0
        if symbol.slow_decay:
            c = phase.a * yv - xc
            theta = 2.0 * math.pi * c * T
            jump = 2.0 * dhT * np.cos(theta) - 4.0 * math.pi * c * hT * np.sin(theta)
        levels = []
        for stride in (8, 4, 2, 1):
            sub = integrand[:, ::stride]
            step = stride * du
            trap = step * (sub.sum(axis=1) - 0.5 * (sub[:, 0] + sub[:, -1]))
            levels.append(trap + step * step * (kink / 6.0 - jump / 12.0))
        vals = levels[-1]
        if symbol.slow_decay:
            tails = np.array([_tail_integral(symbol, xi - phase.a * yv, T) for xi in xc])
            vals = vals + tails
        bad += int(np.sum(np.abs(levels[-1] - levels[-2]) > rtol * scale))
        out[start:start + per] = vals
    if bad:
        warnings.warn(f"{bad} quadrature value(s) not converged to {rtol:g}", QuadratureWarning, stacklevel=2)
    return complex(out[0]) if scalar else out


def _direct_nd(phase, symbol, x, y, T, L, refinement, rtol):
    if symbol.slow_decay:
        raise ValueError("direct quadrature in d >= 2 needs a fast-decaying symbol")
    x = np.atleast_1d(x)
    dim = y.size
    h0 = 1.0 / (8.0 * (np.linalg.norm(x) + np.linalg.norm(y) * L + 1.0)) / refinement
    n = 2 * math.ceil(T / h0)
    ax = np.linspace(-T, T, 2 * n + 1)
    du = ax[1] - ax[0]
    w = np.full(ax.size, du)
    w[0] = w[-1] = du / 2
    mesh = np.meshgrid(*([ax] * dim), indexing="ij", sparse=True)
    comps = phase.phi_on_mesh(mesh)
    arg = sum(c * yi for c, yi in zip(comps, y)) - sum(c * xi for c, xi in zip(mesh, x))
    integrand = symbol.on_mesh(mesh) * np.exp(-2j * math.pi * arg)

    def trap(vals, stride):
        wts = np.full(vals.shape[0], stride * du)
        wts[0] = wts[-1] = stride * du / 2
        out = vals
        for k in range(dim):
            out = np.tensordot(wts, out, axes=([0], [0]))
        return complex(out)

    fine = trap(integrand, 1)
    coarse = trap(integrand[(slice(None, None, 2),) * dim], 2)
    scale = float(np.abs(integrand).sum() * du**dim) or 1.0
    if abs(fine - coarse) > rtol * scale:
        warnings.warn("quadrature value not converged", QuadratureWarning, stacklevel=3)
    return fine


def direct_schur_value(phase, symbol, y, x_step=1.0 / 16.0, x_extent=None, refinement=1):
    """Riemann sum of ``|K(x, y)|`` over ``|x| <= x_extent`` using direct quadrature (d=1)."""
    y = float(np.atleast_1d(y)[0])
    if x_extent is None:
        L = phase_lipschitz(phase, max(_quadrature_radius(phase, symbol), 1.0))
        x_extent = abs(y) * L + symbol.kernel_width() + 8.0
    xs = np.arange(-x_extent, x_extent, x_step)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QuadratureWarning)
        k = direct_quadrature_kernel(phase, symbol, xs, y, refinement)
    return float(x_step * np.abs(k).sum())


# ---------------------------------------------------------------------------
# Schur curves


def schur_slices(phase, symbol, y_magnitudes, direction=None, policy=None, threads=1):
    """Kernel slices along ``direction`` for each ``|y|``; independent per point."""
    ys = [float(v) for v in y_magnitudes]
    if any(v <= 0 for v in ys):
        raise ValueError("y magnitudes must be positive")
    if any(b < a for a, b in zip(ys, ys[1:])):
        raise ValueError("y magnitudes must be sorted")
    direction = np.array([1.0]) if direction is None else np.atleast_1d(np.asarray(direction, dtype=float))
    direction = direction / np.linalg.norm(direction)

    def one(mag):
        try:
            return synthesize_kernel_slice(phase, symbol, mag * direction, policy)
        except GridError as exc:
            raise GridError(f"|y|={mag:g}: {exc}") from exc

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, ys))
    return [one(v) for v in ys]


def schur_curve(phase, symbol, y_magnitudes, direction=None, policy=None, threads=1):
    """``[(|y|, I(y))]`` with ``I(y) = int |K(x, y)| dx``."""
    slices = schur_slices(phase, symbol, y_magnitudes, direction, policy, threads)
    return [(float(np.linalg.norm(s.y)), s.schur_value) for s in slices]


# ---------------------------------------------------------------------------
# warp application


def _keys_weights(t):
    """Keys cubic convolution weights (a = -1/2) for offsets -1, 0, 1, 2."""
    t2, t3 = t * t, t * t * t
    return [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]


@dataclass
class WarpStats:
    out_of_grid_nodes: int
    lost_mass: float


class WarpOperator:
    """``A = F^-1 diag(Phi) W F`` with ``W`` the sparse resampling matrix at ``phi(u_j)``.

    The adjoint is ``F^-1 W^T diag(Phi) F``, exact for the discrete inner products.
    """

    def __init__(self, phase, symbol, grid, interpolation="cubic"):
        if interpolation not in ("cubic", "linear"):
            raise ValueError("interpolation must be 'cubic' or 'linear'")
        self.grid = grid
        self.interpolation = interpolation
        freq = grid.dual()
        self.freq = freq
        mesh = freq.mesh()
        self.phi = np.broadcast_to(symbol.on_mesh(mesh), freq.shape).ravel().astype(float)
        warped = [np.broadcast_to(c, freq.shape).ravel() for c in phase.phi_on_mesh(mesh)]
        self.W, self.outside = self._build(warped)

    def _build(self, warped):
        f = self.freq
        n = f.points_per_axis
        size = f.size
        # fractional index of each warped coordinate
        pos = [w / f.spacing + n // 2 for w in warped]
        outside = np.zeros(size, dtype=bool)
        for p in pos:
            outside |= (p < 0) | (p > n - 1)
        base = [np.floor(p).astype(np.int64) for p in pos]
        frac = [p - b for p, b in zip(pos, base)]
        if self.interpolation == "cubic":
            offsets = (-1, 0, 1, 2)
            weights = [_keys_weights(t) for t in frac]
        else:
            offsets = (0, 1)
            weights = [[1.0 - t, t] for t in frac]
        rows, cols, vals = [], [], []
        row_idx = np.arange(size)
        for combo in itertools.product(range(len(offsets)), repeat=f.dim):
            idx = np.zeros(size, dtype=np.int64)
            wt = np.ones(size)
            valid = ~outside
            for axis, k in enumerate(combo):
                j = base[axis] + offsets[k]
                valid = valid & (j >= 0) & (j < n)
                idx = idx * n + np.clip(j, 0, n - 1)
                wt = wt * weights[axis][k]
            rows.append(row_idx[valid])
            cols.append(idx[valid])
            vals.append(wt[valid])
        W = sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
        )
        return W, outside

    def _check(self, f):
        if f.space_tag != POSITION:
            raise SpaceTagError("the operator acts on position-space functions")
        if f.grid != self.grid:
            raise GridError("function lives on a different grid than the operator")

    def stats(self, fhat_values):
        """Out-of-grid warped nodes with nonzero symbol and an estimate of the energy they lose."""
        active = self.outside & (self.phi != 0)
        count = int(active.sum())
        if not count:
            return WarpStats(0, 0.0)
        v = np.abs(fhat_values)
        n = self.freq.points_per_axis
        band = max(1, n // 20)
        edge = np.ones(v.shape, dtype=bool)
        for ax in range(v.ndim):
            sl = [slice(None)] * v.ndim
            sl[ax] = slice(band, n - band)
            inner = np.zeros(v.shape, dtype=bool)
            inner[tuple(sl)] = True
            edge &= inner
        edge_max = float(v[~edge].max())
        lost = float((self.phi[active] ** 2).sum()) * edge_max**2
        total = float((v**2).sum()) or 1.0
        return WarpStats(count, lost / total)

    def apply(self, f, max_lost_mass=1e-4, return_stats=False):
        self._check(f)
        fhat = forward_ft(f).values
        st = self.stats(fhat)
        if st.lost_mass > max_lost_mass:
            raise GridError(
                f"warp sends {st.out_of_grid_nodes} nodes outside the frequency grid "
                f"(estimated lost mass {st.lost_mass:.2e} > {max_lost_mass:g})"
            )
        v = self.phi * (self.W @ fhat.ravel())
        out = inverse_ft(SampledFunction(self.freq, v, FREQUENCY))
        return (out, st) if return_stats else out

    def adjoint(self, g):
        self._check(g)
        ghat = forward_ft(g).values.ravel()
        v = self.W.T @ (self.phi * ghat)
        return inverse_ft(SampledFunction(self.freq, v, FREQUENCY))

    def normal(self, f):
        """``A^dagger A f`` without the lost-mass check."""
        self._check(f)
        fhat = forward_ft(f).values.ravel()
        v = self.W.T @ (self.phi**2 * (self.W @ fhat))
        return inverse_ft(SampledFunction(self.freq, v, FREQUENCY))


@functools.lru_cache(maxsize=8)
def _warp_for(phase, symbol, grid, interpolation):
    return WarpOperator(phase, symbol, grid, interpolation)


def apply_operator(phase, symbol, f, interpolation="cubic", return_stats=False):
    """``A f`` on ``f``'s grid via resampling of ``f_hat`` at the warped frequencies."""
    return _warp_for(phase, symbol, f.grid, interpolation).apply(f, return_stats=return_stats)


# ---------------------------------------------------------------------------
# L^2 oracle and probes


def oracle_l2_identity(profile, gamma, f_hat, eps0=None, per_octave=16, u_max=None):
    """Change-of-variables value of ``||A f||_2^2`` for ``beta(r) = r^gamma`` in d=1.

    ``f_hat`` is a callable or a frequency-space :class:`SampledFunction`
    (interpolated by cubic splines).  Each half-line is integrated with the
    trapezoid rule on the graded nodes ``eps0 2^(k/per_octave)``, plus the
    exact contribution of ``[0, eps0]`` with the integrand frozen at 0.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if isinstance(f_hat, SampledFunction):
        if f_hat.space_tag != FREQUENCY or f_hat.grid.dim != 1:
            raise SpaceTagError("oracle needs a 1-D frequency-space sample")
        ax = f_hat.grid.axis()
        re = CubicSpline(ax, f_hat.values.real, extrapolate=False)
        im = CubicSpline(ax, f_hat.values.imag, extrapolate=False)

        def fh(u):
            return np.nan_to_num(re(u)) + 1j * np.nan_to_num(im(u))

        u_max = u_max or float(ax[-1])
    else:
        fh = f_hat
        if u_max is None:
            raise ValueError("u_max is required for callable f_hat")
    if eps0 is None:
        eps0 = 1e-9 * u_max
    k = np.arange(0, math.ceil(per_octave * math.log2(u_max / eps0)) + 1)
    nodes = eps0 * 2.0 ** (k / per_octave)
    p = 1.0 / (1.0 + gamma)
    total = 0.0
    for sign in (1.0, -1.0):
        u = sign * nodes
        integrand = p * nodes ** (p - 1.0) * np.abs(profile(nodes**p)) ** 2 * np.abs(fh(u)) ** 2
        # trapezoid in t = log u, du = u dt
        total += integrate.trapezoid(integrand * nodes, dx=math.log(2.0) / per_octave)
        total += abs(profile(np.array([0.0]))[0]) ** 2 * abs(fh(np.array([0.0]))[0]) ** 2 * eps0**p
    return float(total)


def concentration_family(grid, eps, ramp=0.25):
    """``f_eps`` with ``f_hat`` a flat-top bump on ``[eps, 2 eps]`` of unit L^2 mass.

    Returns ``(f, f_hat_callable)``; the callable is the exact normalized bump.
    """
    freq = grid.dual()
    u = freq.axis()
    raw = interval_plateau(u, eps, 2.0 * eps, ramp)
    # normalize with a fine quadrature of the exact profile
    fine = np.linspace(eps, 2.0 * eps, 20001)
    norm = math.sqrt(integrate.trapezoid(interval_plateau(fine, eps, 2.0 * eps, ramp) ** 2, fine))

    def fhat(v):
        return interval_plateau(np.asarray(v, dtype=float), eps, 2.0 * eps, ramp) / norm

    f = inverse_ft(SampledFunction(freq, raw / norm, FREQUENCY))
    return f, fhat


def gabor_atom(grid, x0, omega, sigma=1.0):
    """``M_omega T_x0`` of a Gaussian of width ``sigma``, normalized in L^2 (d=1 coordinates per axis)."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    mesh = grid.mesh()
    r2 = sum((c - a) ** 2 for c, a in zip(mesh, x0))
    phase = sum(c * w for c, w in zip(mesh, omega))
    vals = np.exp(-math.pi * r2 / sigma**2) * np.exp(2j * math.pi * phase)
    f = SampledFunction(grid, np.broadcast_to(vals, grid.shape), POSITION)
    return f * (1.0 / l2_norm(f))


@dataclass(frozen=True)
class ProbePlan:
    """What :func:`l2_probe` measures.

    ``grid`` carries the atoms and the power iteration; the concentration
    family (if ``epsilons`` is non-empty) uses ``concentration_grid``.
    """

    grid: object
    atoms: int = 16
    seed: int = 0
    epsilons: tuple = ()
    concentration_grid: object = None
    iterations: int = 20
    tolerance: float = 1e-3
    interpolation: str = "cubic"


@dataclass
class OperatorProbe:
    rayleigh_values: list
    power_iteration_estimate: float
    concentration_profile: list
    power_history: list = field(default_factory=list)


def power_iteration(op, grid, iterations=20, tolerance=1e-3, seed=0):
    """Estimate ``||A||`` by iterating ``f <- A^dagger A f / norm`` from seeded white noise.

    Returns the final estimate ``||A f||`` for unit ``f`` and the history.
    """
    rng = np.random.default_rng(seed)
    f = SampledFunction(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    f = f * (1.0 / l2_norm(f))
    history = []
    for _ in range(iterations):
        g = op.normal(f)
        # <A^dagger A f, f> = ||A f||^2 for unit f
        est = math.sqrt(max(float(np.vdot(f.values, g.values).real) * grid.spacing**grid.dim, 0.0))
        history.append(est)
        ng = l2_norm(g)
        if ng == 0:
            break
        f = g * (1.0 / ng)
        if len(history) > 1 and abs(history[-1] - history[-2]) <= tolerance * history[-1]:
            break
    return history[-1], history


def l2_probe(phase, symbol, plan):
    """Rayleigh quotients on random Gabor atoms, a power-iteration norm estimate and a concentration profile."""
    grid = plan.grid
    op = _warp_for(phase, symbol, grid, plan.interpolation)
    rng = np.random.default_rng(plan.seed)
    R, U = grid.half_extent, grid.dual().half_extent
    rayleigh = []
    for i in range(plan.atoms):
        x0 = rng.uniform(-R / 4, R / 4, grid.dim)
        om = rng.uniform(-U / 4, U / 4, grid.dim)
        sig = rng.uniform(0.5, 2.0)
        f = gabor_atom(grid, x0, om, sig)
        rayleigh.append((i, l2_norm(op.apply(f))))
    est, hist = power_iteration(op, grid, plan.iterations, plan.tolerance, plan.seed)
    profile = []
    if plan.epsilons:
        cg = plan.concentration_grid or grid
        cop = _warp_for(phase, symbol, cg, plan.interpolation)
        for eps in plan.epsilons:
            f, _ = concentration_family(cg, eps)
            profile.append((float(eps), l2_norm(cop.apply(f)) / l2_norm(f)))
    return OperatorProbe(rayleigh, est, profile, hist)


# ---------------------------------------------------------------------------
# output


def write_schur_csv(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y_mag", "schur"])
        for y, v in points:
            w.writerow([f"{y:.12g}", f"{v:.12g}"])


def write_profile_csv(profile, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epsilon", "ratio"])
        for e, r in profile:
            w.writerow([f"{e:.12g}", f"{r:.12g}"])


def write_sidecar(path, config, policies):
    """JSON sidecar with the run configuration and the grid choices per point."""
    with open(path, "w") as fh:
        json.dump({"config": config, "grid_policies": policies}, fh, indent=2, sort_keys=True)
        fh.write("\n")

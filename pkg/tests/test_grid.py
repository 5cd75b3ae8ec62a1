import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from hoelderfio.grid import (
    GridError,
    SampledFunction,
    SpaceTagError,
    forward_ft,
    inverse_ft,
    l1_norm,
    l2_norm,
    load_binary,
    make_grid,
    save_binary,
    save_csv,
    weighted_l1_norm,
)


def gauss(x):
    return np.exp(-math.pi * x * x)


@pytest.fixture(scope="module")
def g1():
    return make_grid(1, 4096, 64.0)


def test_make_grid_spacing():
    assert make_grid(1, 1024, 32).spacing == 0.0625
    g = make_grid(2, 256, 8)
    assert g.spacing == 0.0625
    assert g.size == 65536
    assert g.spacing * g.points_per_axis == 2 * g.half_extent


@pytest.mark.parametrize("n", [1000, 4, 0, 12])
def test_make_grid_rejects_bad_counts(n):
    with pytest.raises(GridError):
        make_grid(1, n, 32)


def test_make_grid_rejects_bad_dim_and_extent():
    with pytest.raises(GridError):
        make_grid(4, 8, 1.0)
    with pytest.raises(GridError):
        make_grid(1, 8, 0.0)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("HOELDERFIO_MAX_POINTS", "1024")
    with pytest.raises(GridError, match="budget"):
        make_grid(2, 64, 4.0)
    assert make_grid(1, 1024, 4.0).size == 1024


def test_dual_grid(g1):
    d = g1.dual()
    assert d.half_extent == 4096 / (4 * 64)
    assert d.spacing == pytest.approx(1 / 128)


def test_sampled_function_invariants(g1):
    with pytest.raises(GridError):
        SampledFunction(g1, np.zeros(10))
    with pytest.raises(ValueError):
        SampledFunction(g1, np.full(g1.size, np.nan))
    with pytest.raises(SpaceTagError):
        SampledFunction(g1, np.zeros(g1.size), "time")
    f = SampledFunction(g1, np.zeros(g1.size))
    assert not f.values.flags.writeable


def test_gaussian_is_self_dual(g1):
    f = SampledFunction.from_callable(gauss, g1)
    F = forward_ft(f)
    assert F.space_tag == "frequency"
    assert np.abs(F.values - gauss(F.grid.axis())).max() < 1e-10


def test_delta_goes_to_constant(g1):
    v = np.zeros(g1.size)
    v[g1.points_per_axis // 2] = 1 / g1.spacing
    F = forward_ft(SampledFunction(g1, v))
    assert np.allclose(F.values, 1.0, atol=1e-12)
    back = inverse_ft(SampledFunction(g1.dual(), np.ones(g1.size), "frequency"))
    assert l1_norm(back) == pytest.approx(1.0, abs=1e-9)
    assert back.values[g1.points_per_axis // 2].real == pytest.approx(1 / g1.spacing)


@pytest.mark.parametrize("shift", [-2.0, -1.0, 1.0, 2.0])
def test_translation_and_modulation_covariance(g1, shift):
    x = g1.axis()
    F = forward_ft(SampledFunction(g1, gauss(x - shift)))
    u = F.grid.axis()
    assert np.abs(F.values - np.exp(-2j * math.pi * shift * u) * gauss(u)).max() < 1e-10
    G = inverse_ft(SampledFunction(g1.dual(), gauss(u - shift) + 0j, "frequency"))
    assert np.abs(G.values - np.exp(2j * math.pi * shift * x) * gauss(x)).max() < 1e-10


def test_wrong_tag_is_refused(g1):
    f = SampledFunction.from_callable(gauss, g1)
    with pytest.raises(SpaceTagError):
        inverse_ft(f)
    with pytest.raises(SpaceTagError):
        forward_ft(forward_ft(f))


def test_norms_of_gaussian(g1):
    f = SampledFunction.from_callable(gauss, g1)
    assert l1_norm(f) == pytest.approx(1.0, abs=1e-8)
    assert l2_norm(f) == pytest.approx(2**-0.25, abs=1e-8)
    assert weighted_l1_norm(f, 0) == l1_norm(f)
    # exact Gaussian moments, cross-checked by adaptive quadrature
    exact = 1 + 2 / math.pi + 1 / (2 * math.pi)
    half, _ = integrate.quad(lambda t: (1 + t) ** 2 * math.exp(-math.pi * t * t), 0, np.inf, epsabs=1e-14)
    quad = 2 * half
    assert quad == pytest.approx(exact, rel=1e-10)
    # the weight has a kink at 0 (derivative jump 4), so the Riemann sum is
    # off by the Euler-Maclaurin terms -h^2/12 * 4 and h^4/720 * (-24 pi)
    h = g1.spacing
    predicted = exact - h**2 / 3 - math.pi * h**4 / 30
    assert weighted_l1_norm(f, 2) == pytest.approx(predicted, abs=1e-10)
    fine = SampledFunction.from_callable(gauss, make_grid(1, 65536, 64.0))
    assert weighted_l1_norm(fine, 2) == pytest.approx(exact, rel=1e-6)


def test_norms_of_zero_and_indicator(g1):
    z = SampledFunction(g1, np.zeros(g1.size))
    assert l1_norm(z) == 0 and l2_norm(z) == 0 and weighted_l1_norm(z, 3.0) == 0
    x = g1.axis()
    ind = SampledFunction(g1, ((x >= 0) & (x < 1)).astype(float))
    assert abs(l1_norm(ind) - 1.0) <= g1.spacing
    with pytest.raises(ValueError):
        weighted_l1_norm(z, -1)


def test_parseval_and_round_trip(g1):
    rng = np.random.default_rng(3)
    v = rng.standard_normal(g1.size) + 1j * rng.standard_normal(g1.size)
    f = SampledFunction(g1, v)
    F = forward_ft(f)
    assert l2_norm(F) == pytest.approx(l2_norm(f), rel=1e-10)
    back = inverse_ft(F)
    assert np.abs(back.values - v).max() / np.abs(v).max() < 1e-12
    assert back.grid == g1


@settings(max_examples=25, deadline=None)
@given(
    c=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
    seed=st.integers(0, 2**32 - 1),
)
def test_l1_homogeneity(c, seed):
    g = make_grid(1, 64, 4.0)
    v = np.random.default_rng(seed).standard_normal(g.size)
    f = SampledFunction(g, v)
    assert l1_norm(f * c) == pytest.approx(abs(c) * l1_norm(f), rel=1e-12, abs=1e-300)


@settings(max_examples=20, deadline=None)
@given(dim=st.sampled_from([1, 2]), seed=st.integers(0, 2**32 - 1))
def test_round_trip_property(dim, seed):
    g = make_grid(dim, 32, 3.0)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    back = inverse_ft(forward_ft(SampledFunction(g, v)))
    assert np.abs(back.values - v).max() <= 1e-12 * np.abs(v).max()


def test_two_dimensional_gaussian():
    g = make_grid(2, 256, 8.0)
    f = SampledFunction.from_callable(lambda x, y: gauss(x) * gauss(y), g)
    F = forward_ft(f)
    u, v = F.grid.mesh()
    assert np.abs(F.values - gauss(u) * gauss(v)).max() < 1e-10
    assert l1_norm(f) == pytest.approx(1.0, abs=1e-8)


def test_binary_round_trip(tmp_path, g1):
    f = SampledFunction.from_callable(lambda x: gauss(x) * np.exp(1j * x), g1)
    p = tmp_path / "f.bin"
    save_binary(f, p)
    raw = p.read_bytes()
    assert len(raw) == 4 + 8 + 8 + 1 + 16 * g1.size
    g = load_binary(p)
    assert g.grid == g1 and g.space_tag == "position"
    assert np.array_equal(g.values, f.values)
    F = forward_ft(f)
    save_binary(F, p)
    assert load_binary(p).space_tag == "frequency"


def test_csv_export(tmp_path):
    g = make_grid(2, 8, 1.0)
    f = SampledFunction(g, np.arange(64) * (1 + 1j))
    p = tmp_path / "f.csv"
    save_csv(f, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "x0,x1,re,im"
    assert len(lines) == 65
    assert lines[2].split(",") == ["-1", "-0.75", "1", "1"]

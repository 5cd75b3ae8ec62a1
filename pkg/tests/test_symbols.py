import math

import numpy as np
import pytest
from scipy import integrate

from hoelderfio.grid import l1_norm, make_grid
from hoelderfio.symbols import SymbolSpec, eval_symbol, m1_admissible, sample_symbol


def test_phiex_values():
    s = SymbolSpec.phiex(2)
    assert eval_symbol(s, 0.0) == 0.0
    assert eval_symbol(s, 1.0) == 0.25
    assert eval_symbol(s, [0.6, 0.8]) == pytest.approx(0.25, rel=1e-15)


def test_bump_plateau_and_support():
    s = SymbolSpec.bump(1.0)
    assert eval_symbol(s, 0.5) == 1.0
    assert eval_symbol(s, [0.3, 0.4]) == 1.0
    g = make_grid(1, 1024, 32)
    v = sample_symbol(s, g).values
    x = g.axis()
    assert np.all(v[np.abs(x) >= 2] == 0)
    assert np.all((v >= 0) & (v <= 1))


def test_gaussian_samples_are_exact():
    s = SymbolSpec.gaussian(1.0)
    g = make_grid(1, 1024, 32)
    f = sample_symbol(s, g)
    assert f.space_tag == "frequency"
    x = g.axis()
    assert np.array_equal(f.values.real, [eval_symbol(s, t) for t in x])
    assert np.allclose(f.values.real, np.exp(-math.pi * x**2), rtol=1e-12, atol=0)


def test_phiex_l1_norm_is_one():
    # fine enough that the 1/u^3 tail beyond 512 is below 1e-5
    g = make_grid(1, 2**21, 1024.0)
    assert l1_norm(sample_symbol(SymbolSpec.phiex(2), g)) == pytest.approx(1.0, abs=1e-4)
    # the same integral by adaptive quadrature
    half, _ = integrate.quad(lambda u: u / (1 + u * u) ** 2, 0, np.inf)
    assert 2 * half == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("s", [SymbolSpec.phiex(2), SymbolSpec.bump(0.7), SymbolSpec.gaussian(1.5)])
def test_radial_symmetry_2d(s):
    rng = np.random.default_rng(1)
    u = rng.uniform(-3, 3, (200, 2))
    base = s.evaluate(u)
    for q in (u[:, ::-1], -u, u * [1, -1], u[:, ::-1] * [-1, 1]):
        assert np.array_equal(s.evaluate(q), base)


def test_phiex_decay_bound():
    r = np.geomspace(1, 1e4, 500)
    for m in (1.0, 1.5, 2.0, 3.0):
        s = SymbolSpec.phiex(m)
        assert np.all(s.profile(r) <= r ** (1 - 2 * m))


def test_bump_product_preserves_support():
    g = make_grid(2, 128, 4)
    rng = np.random.default_rng(0)
    other = rng.standard_normal(g.shape)
    prod = sample_symbol(SymbolSpec.bump(1.0), g).values * other
    uu, vv = g.mesh()
    assert np.all(prod[np.hypot(uu, vv) >= 2] == 0)


def test_sup_norm():
    s = SymbolSpec.phiex(2)
    r = np.linspace(0, 5, 200001)
    assert s.sup_norm == pytest.approx(s.profile(r).max(), rel=1e-9)
    assert SymbolSpec.gaussian().sup_norm == 1.0


def test_m1_admissible():
    assert m1_admissible(SymbolSpec.phiex(2), 1)
    assert not m1_admissible(SymbolSpec.phiex(1), 2)
    assert not m1_admissible(SymbolSpec.phiex(1), 1)
    assert m1_admissible(SymbolSpec.phiex(1.6), 2)
    for d in (1, 2, 3):
        assert m1_admissible(SymbolSpec.gaussian(), d)
        assert m1_admissible(SymbolSpec.bump(), d)
    with pytest.raises(ValueError):
        m1_admissible(SymbolSpec.custom(lambda u: np.ones(u.shape[:-1])), 1)


def test_invalid_specs():
    with pytest.raises(ValueError):
        SymbolSpec.phiex(0)
    with pytest.raises(ValueError):
        SymbolSpec.bump(-1)
    with pytest.raises(ValueError):
        SymbolSpec("triangle")


def test_custom_non_finite():
    s = SymbolSpec.custom(lambda u: np.full(u.shape[:-1], np.inf))
    with pytest.raises(ValueError):
        eval_symbol(s, 0.3)


def test_json_round_trip():
    for s in (SymbolSpec.phiex(2.5), SymbolSpec.bump(0.5), SymbolSpec.gaussian(2)):
        assert SymbolSpec.from_json(s.to_json()) == s

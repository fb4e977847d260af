import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridfrac.fracops import Grid, SampledFunction
from hybridfrac.mnc import (
    FunctionFamily,
    class_f_check,
    class_f_members,
    condition_m_diagnostic,
    contraction_diagnostic,
    default_epsilons,
    family_modulus_curve,
    lag_increments,
    modulus,
    product_family,
)
from hybridfrac.problem import ProblemSpec, example1

G = Grid(1025)
T = G.nodes


def sf(values, grid=G):
    return SampledFunction(grid, np.asarray(values, dtype=float))


def brute_modulus(v, lag):
    n = len(v)
    return max((abs(v[i] - v[j]) for i in range(n) for j in range(i, min(n, i + lag + 1))), default=0.0)


def test_linear():
    assert modulus(sf(T), 0.25) == pytest.approx(0.25, abs=1e-15)


def test_sqrt_at_grid_spacing():
    assert modulus(sf(np.sqrt(T)), G.h) == pytest.approx(G.h**0.5, abs=1e-15)
    assert G.h**0.5 == 0.03125


def test_family_with_zero_member():
    X = FunctionFamily.of([sf(np.zeros(1025)), sf(T)])
    c = family_modulus_curve(X, [0.5, 0.125, 1 / 1024])
    np.testing.assert_allclose(c.omegas, [0.5, 0.125, 1 / 1024], atol=1e-15)


def test_eps_below_spacing_rejected():
    X = FunctionFamily.of([sf(T)])
    with pytest.raises(ValueError, match="grid spacing"):
        family_modulus_curve(X, [0.5, G.h / 2])
    with pytest.raises(ValueError):
        family_modulus_curve(X, [0.25, 0.5])


def test_default_epsilons_reach_spacing():
    e = default_epsilons(G)
    assert e[0] == 0.5 and e[-1] == G.h


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(1, 16))
def test_lag_increments_match_brute_force(seed, lag):
    v = np.random.default_rng(seed).normal(size=33)
    g = Grid(33)
    assert modulus(sf(v, g), lag * g.h) == pytest.approx(brute_modulus(v, lag), abs=0)
    assert lag_increments(v, lag).shape == (lag,)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_curve_monotone_and_bounded_by_diameter(seed):
    rng = np.random.default_rng(seed)
    g = Grid(129)
    X = FunctionFamily.of([sf(np.cumsum(rng.normal(size=129)), g) for _ in range(3)])
    c = family_modulus_curve(X)
    assert np.all(np.diff(c.omegas) <= 0)
    diam = max(np.ptp(m.values) for m in X.members)
    assert c.omegas.max() <= diam


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_subfamily_monotone(seed):
    rng = np.random.default_rng(seed)
    g = Grid(65)
    ms = [sf(rng.normal(size=65), g) for _ in range(4)]
    big = family_modulus_curve(FunctionFamily.of(ms))
    small = family_modulus_curve(FunctionFamily.of(ms[:2]))
    assert np.all(small.omegas <= big.omegas)


def test_family_grid_mismatch():
    with pytest.raises(ValueError):
        FunctionFamily.of([sf(T), sf(np.zeros(33), Grid(33))])
    with pytest.raises(ValueError):
        FunctionFamily.of([])


def test_product_family_size():
    g = Grid(33)
    X = FunctionFamily.of([sf(np.ones(33), g), sf(g.nodes, g)])
    Y = FunctionFamily.of([sf(g.nodes**2, g), sf(2 * np.ones(33), g), sf(-g.nodes, g)])
    assert len(product_family(X, Y)) == 6


def test_condition_m_random_families():
    rng = np.random.default_rng(2024)
    g = Grid(257)
    violations = 0
    for _ in range(1000):
        X = FunctionFamily.of([sf(rng.normal(size=257), g) for _ in range(5)])
        Y = FunctionFamily.of([sf(np.cumsum(rng.normal(size=257)) / 16, g) for _ in range(5)])
        violations += sum(not r.holds for r in condition_m_diagnostic(X, Y))
    assert violations == 0


def test_contraction_zero_forcing():
    spec = ProblemSpec.from_sources(0.5, "1 + x", "0", "t", "t", 0.25, 1 / 3)
    X = FunctionFamily.of([sf(T), sf(np.sin(3 * T))])
    d = contraction_diagnostic(X, spec)
    assert np.all(d.curve_tx.omegas == 0)
    assert all(r.omega_tx == 0 for r in d.rows)


def test_contraction_singleton_zero():
    d = contraction_diagnostic(FunctionFamily.of([sf(np.zeros(1025))]), example1())
    assert all(r.omega_x == 0 and r.bound == 0 for r in d.rows)
    # T(0) is a single continuous function with positive oscillation
    assert d.rows[0].omega_tx > 0


def test_contraction_bound_column():
    X = FunctionFamily.of([sf(T), sf(T**2)])
    d = contraction_diagnostic(X, example1(), [0.5, 0.25])
    for r in d.rows:
        assert r.bound == pytest.approx((r.omega_x + 1) ** 0.25 - 1)


@pytest.mark.parametrize("name", sorted(class_f_members()))
def test_class_f_members_pass(name):
    ok, msg = class_f_check(class_f_members(beta=0.5)[name])
    assert ok, msg


def test_class_f_rejects_constant_one():
    ok, _ = class_f_check(lambda t: np.ones_like(t))
    assert not ok


def test_class_f_rejects_limit_above_one():
    ok, msg = class_f_check(lambda t: 2.0 + t)
    assert not ok and "approach" in msg

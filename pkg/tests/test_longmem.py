from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uvlab.distributions import BUILTINS, Normal, StandardNormal, Uniform, get_distribution
from uvlab.empirical import EmpiricalDiff, v_statistic, weighted_sup_distance
from uvlab.errors import ConstraintViolated, UnsupportedInnovation
from uvlab.kernels import make_kernel, v_true
from uvlab.longmem import (
    LongMemoryConfig,
    ScalingSequence,
    appell_basis,
    corrected_vstat,
    expansion_process,
    filter_innovations,
    filter_innovations_naive,
    marginal_model,
    scaling,
    simulate_linear_process,
)

N01 = StandardNormal()


def test_appell_first_order():
    for name in BUILTINS:
        F = get_distribution(name)
        b = appell_basis(F, 1)
        assert b.coef[1][1] == 1
        assert float(b.coef[1][0]) == pytest.approx(-F.mean, abs=1e-15)


def test_hermite_coefficients_exact():
    b = appell_basis(N01, 4)
    expected = [(1,), (0, 1), (-1, 0, 1), (0, -3, 0, 1), (3, 0, -6, 0, 1)]
    assert [tuple(c) for c in b.coef] == [tuple(Fraction(v) for v in e) for e in expected]
    assert all(isinstance(c, Fraction) for row in b.coef for c in row)


def test_uniform_second_order():
    b = appell_basis(Uniform(0, 1), 2)
    assert tuple(b.coef[2]) == (Fraction(1, 6), Fraction(-1), Fraction(1))


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_appell_identities(name):
    F = get_distribution(name)
    b = appell_basis(F, 4)
    for j in range(1, 5):
        # derivative identity, exact in coefficients
        deriv = [k * b.coef[j][k] for k in range(1, j + 1)]
        assert deriv == [j * c for c in b.coef[j - 1]]
        # zero mean
        assert abs(F.expect(lambda x: b.evaluate(j, x), tol=1e-13)) <= 1e-10


def test_zero_innovations_give_zero_path():
    cfg = LongMemoryConfig(0.7, 64)
    assert np.all(filter_innovations(cfg, np.zeros(200)) == 0.0)


def test_fft_against_naive_small(rng):
    cfg = LongMemoryConfig(0.7, 4)
    eps = rng.standard_normal(50 + 3)
    np.testing.assert_allclose(filter_innovations(cfg, eps), filter_innovations_naive(cfg, eps), rtol=0, atol=1e-12)


@pytest.mark.parametrize("n,M", [(256, 64), (1024, 256)])
def test_fft_against_naive(n, M, rng):
    cfg = LongMemoryConfig(0.7, M)
    eps = rng.standard_normal(n + M - 1)
    fast, slow = filter_innovations(cfg, eps), filter_innovations_naive(cfg, eps)
    assert fast.size == n
    assert np.max(np.abs(fast - slow) / np.maximum(np.abs(slow), 1e-300)) <= 1e-10 or \
        np.max(np.abs(fast - slow)) <= 1e-12


def test_simulation_is_reproducible():
    cfg = LongMemoryConfig(0.7, 256)
    a = simulate_linear_process(cfg, 100, np.random.default_rng(3)).values
    b = simulate_linear_process(cfg, 100, np.random.default_rng(3)).values
    assert np.array_equal(a, b)


def test_marginal_variance():
    cfg = LongMemoryConfig(0.7, 2**14)
    s = np.arange(1, 2**14, dtype=float)
    direct = 1.0 + np.sum(s[::-1] ** (-1.4))
    assert marginal_model(cfg).var == pytest.approx(direct, rel=1e-12)
    assert cfg.variance_deficit > 0


def test_config_constraints():
    with pytest.raises(ConstraintViolated):
        LongMemoryConfig(0.5)
    with pytest.raises(ConstraintViolated):
        LongMemoryConfig(0.7, innovation=Normal(1.0, 1.0))
    with pytest.raises(UnsupportedInnovation):
        marginal_model(LongMemoryConfig(0.7, 16, innovation=Uniform(-1, 1)))


def test_expansion_process_low_orders(rng):
    b = appell_basis(N01, 2)
    x = rng.standard_normal(40)
    grid = np.linspace(-3, 3, 101)
    e0 = expansion_process(x, N01, b, 0)
    np.testing.assert_array_equal(e0.eval(grid), EmpiricalDiff(x, N01).eval(grid))
    x = x - x.mean()
    e1 = expansion_process(x, N01, b, 1)
    np.testing.assert_allclose(e1.eval(grid), EmpiricalDiff(x, N01).eval(grid), atol=1e-15)


def test_scaling_values():
    assert scaling(ScalingSequence(1, 0.7), 100) == pytest.approx(100**0.2)
    assert scaling(ScalingSequence(2, 0.7), 100) == pytest.approx(6.30957, abs=1e-5)
    assert scaling(ScalingSequence(3, 0.5 + 1e-12), 10**6) == pytest.approx(1.0, abs=1e-9)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=30))
def test_trivial_correction(xs):
    x = np.array(xs)
    for name in ("gini", "variance"):
        k = make_kernel(name, N01)
        b = appell_basis(N01, 1)
        assert corrected_vstat(k, x, None, b, 1, 1, 1) == pytest.approx(v_statistic(k, x) - v_true(k), abs=1e-12)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=30))
def test_variance_correction_is_plain_difference(xs):
    x = np.array(xs)
    k = make_kernel("variance", N01)
    b = appell_basis(N01, 2)
    assert corrected_vstat(k, x, None, b, 2, 1, 1) == pytest.approx(v_statistic(k, x) - v_true(k), abs=1e-8)


def test_symmetry_correction_is_plain_difference(rng):
    k = make_kernel("symmetry", N01)
    b = appell_basis(N01, 4)
    x = rng.standard_normal(40)
    assert corrected_vstat(k, x, None, b, 4, 2, 2) == pytest.approx(v_statistic(k, x) - v_true(k), abs=1e-8)


def test_fast_method_matches_direct(rng):
    k = make_kernel("symmetry", N01)
    b = appell_basis(N01, 4)
    x = rng.standard_normal(40)
    assert corrected_vstat(k, x, None, b, 4, 2, 2, method="fast") == pytest.approx(
        corrected_vstat(k, x, None, b, 4, 2, 2), abs=1e-12)


def test_scaled_remainder_decays():
    beta = 0.7
    cfg = LongMemoryConfig(beta)
    F = marginal_model(cfg)
    b = appell_basis(F, 1)
    med = []
    for n in (500, 4000):
        vals = []
        for rep in range(60):
            x = simulate_linear_process(cfg, n, np.random.default_rng([11, rep, n]))
            vals.append(n ** (beta - 0.5) * weighted_sup_distance(expansion_process(x, F, b, 1), 0.0))
        med.append(np.median(vals))
    assert med[1] < med[0]

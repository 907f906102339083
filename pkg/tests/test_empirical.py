import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import admissible_pairs
from uvlab.distributions import StandardNormal, Uniform, get_distribution
from uvlab.empirical import (
    EmpiricalDiff,
    ks_statistic,
    u_statistic,
    uv_bridge_residual,
    v_statistic,
    weighted_sup_distance,
)
from uvlab.errors import SampleTooSmall
from uvlab.kernels import CATALOGUE, make_kernel
from uvlab.measures import ZERO

N01 = StandardNormal()
K = {name: make_kernel(name, N01) for name in CATALOGUE}


def test_small_statistics():
    assert v_statistic(K["variance"], [0, 2]) == pytest.approx(1.0)
    assert v_statistic(K["gini"], [0, 1]) == pytest.approx(0.5)
    assert v_statistic(K["product"], [1, -1]) == 0.0
    assert u_statistic(K["variance"], [0, 2]) == pytest.approx(2.0)
    assert u_statistic(K["gini"], [0, 1]) == pytest.approx(1.0)
    assert u_statistic(K["gini"], [1.5] * 6) == 0.0
    assert uv_bridge_residual(K["variance"], [0, 2]) == 0.0
    assert uv_bridge_residual(K["gini"], [0, 1]) == 0.0
    with pytest.raises(SampleTooSmall):
        u_statistic(K["gini"], [1.0])


def test_cvm_bridge(rng):
    k = make_kernel("cvm", Uniform(0, 1))
    for _ in range(20):
        assert uv_bridge_residual(k, rng.uniform(size=int(rng.integers(2, 40)))) <= 1e-12


def test_sup_distance_examples():
    assert weighted_sup_distance(ZERO, 0.0) == 0.0
    assert weighted_sup_distance(EmpiricalDiff([0.5], Uniform(0, 1)), 0.0) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("name,dist", admissible_pairs())
def test_bridge_identity_sweep(name, dist):
    k = make_kernel(name, get_distribution(dist))
    r = np.random.default_rng(7)
    for _ in range(40):
        x = k.model.sample(r, int(r.integers(2, 51)))
        assert uv_bridge_residual(k, x) <= 1e-12 * (1 + abs(v_statistic(k, x)))


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=30), st.randoms())
def test_permutation_invariance(xs, rnd):
    perm = list(xs)
    rnd.shuffle(perm)
    for name in ("gini", "variance", "symmetry"):
        assert v_statistic(K[name], xs) == pytest.approx(v_statistic(K[name], perm), abs=1e-12)


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=25))
def test_symmetric_u_over_unordered_pairs(xs):
    x = np.asarray(xs)
    n = x.size
    for name in ("gini", "variance", "symmetry"):
        k = K[name]
        iu = np.triu_indices(n, 1)
        pairs = k.g(x[iu[0]], x[iu[1]])
        assert u_statistic(k, x) == pytest.approx(2 * pairs.sum() / (n * (n - 1)), abs=1e-12)


@given(st.integers(1, 200), st.integers(0, 2**32 - 1))
def test_sup_distance_is_ks(n, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    assert weighted_sup_distance(EmpiricalDiff(x, N01), 0.0) == pytest.approx(ks_statistic(x, N01), abs=1e-12)


def test_weight_inflates_distance(rng):
    x = rng.standard_normal(50)
    d = EmpiricalDiff(x, N01)
    assert weighted_sup_distance(d, 1.0) >= weighted_sup_distance(d, 0.0)

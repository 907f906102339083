import numpy as np
import pytest

from conftest import admissible_pairs
from uvlab.distributions import FivePoint, Normal, StandardNormal, TwoPoint, Uniform, get_distribution
from uvlab.errors import MissingModelData
from uvlab.kernels import CATALOGUE, make_kernel, rebind, v_true
from uvlab.measures import ProductOf, rect_mass

PAIRS = admissible_pairs()


def test_catalogue_ids():
    assert CATALOGUE == ("gini", "variance", "product", "sq-abs-mean", "cvm", "symmetry", "artificial")
    with pytest.raises(KeyError, match="catalogue"):
        make_kernel("nope", StandardNormal())


def test_variance_truth_is_sigma2():
    for F in (StandardNormal(), Normal(1.0, 4.0), Uniform(0, 1), FivePoint()):
        assert v_true(make_kernel("variance", F)) == pytest.approx(F.var, rel=1e-12)


def test_gini_twopoint():
    k = make_kernel("gini", TwoPoint())
    assert v_true(k) == pytest.approx(0.5)
    (dens,) = k.dmarginal1.components
    x = np.linspace(0.001, 0.999, 50)
    assert np.all(dens.h(x) * dens.sign == 0.0)


def test_artificial_rescales():
    k = make_kernel("artificial", StandardNormal())
    assert k.model.abs_mean() == pytest.approx(1.0, abs=1e-12)
    x = np.linspace(-3, 3, 11)
    assert np.all(k.marginal_g1(x) == 0.0)
    with pytest.raises(MissingModelData):
        make_kernel("artificial", Uniform(0, 1))


def test_symmetry_truth_zero_for_symmetric():
    for F in (StandardNormal(), Uniform(-1, 1), FivePoint()):
        assert v_true(make_kernel("symmetry", F)) == 0.0


def test_variance_product_measures_are_negatives():
    F = StandardNormal()
    (pv,) = make_kernel("variance", F).dg.components
    (pp,) = make_kernel("product", F).dg.components
    assert isinstance(pv, ProductOf) and isinstance(pp, ProductOf)
    assert pv.sign == -pp.sign
    assert pv.m1.components[0].h(np.array([0.3])) == pp.m1.components[0].h(np.array([0.3]))


@pytest.mark.parametrize("name,dist", PAIRS)
def test_second_difference_matches_measure(name, dist):
    k = make_kernel(name, get_distribution(dist))
    r = np.random.default_rng(abs(hash((name, dist))) % 2**32)
    for _ in range(100):
        a1, b1 = r.uniform(-2.5, 2.0, 2)
        a2, b2 = a1 + r.uniform(0.05, 2), b1 + r.uniform(0.05, 2)
        g = k.g
        second = g(a2, b2) - g(a1, b2) - g(a2, b1) + g(a1, b1)
        assert rect_mass(k.dg, (a1, a2, b1, b2)) == pytest.approx(float(second), abs=1e-9)


@pytest.mark.parametrize("name,dist", PAIRS)
def test_truth_against_double_integral(name, dist):
    k = make_kernel(name, get_distribution(dist))
    F = k.model

    def inner(x1):
        x1 = np.asarray(x1, dtype=float)
        vals = [F.expect(lambda x2: k.g(a, x2), tol=1e-11, kinks=(0.0, a, -a)) for a in x1.ravel()]
        return np.reshape(vals, x1.shape)

    double = F.expect(inner, tol=1e-9, kinks=(0.0,))
    assert double == pytest.approx(v_true(k), abs=1e-6)


@pytest.mark.parametrize("name,dist", PAIRS)
def test_fast_vstat_matches_direct(name, dist, rng):
    from uvlab.empirical import v_statistic

    k = make_kernel(name, get_distribution(dist))
    for n in (1, 2, 17, 60):
        x = k.model.sample(rng, n)
        assert v_statistic(k, x, "fast") == pytest.approx(v_statistic(k, x), abs=1e-12)


def test_cvm_with_weight(rng):
    from uvlab.empirical import v_statistic
    from uvlab.decomposition import verify_representation

    w = lambda t: 1.0 + np.asarray(t) ** 2
    F = Uniform(0, 1)
    k = make_kernel("cvm", F, w=w)
    assert k.fast_vstat is None
    x = rng.uniform(size=30)
    # direct definition: int (F_n - F)^2 w dF
    grid = np.linspace(0, 1, 200001)
    Fn = np.searchsorted(np.sort(x), grid, side="right") / x.size
    brute = np.trapezoid((Fn - grid) ** 2 * w(grid), grid)
    assert v_statistic(k, x) == pytest.approx(brute, abs=1e-5)
    rep = verify_representation(k, x)
    assert abs(rep.linear_forward) <= 1e-12
    assert rep.worst <= 1e-6


def test_rebind_builds_for_new_model():
    k = make_kernel("variance", StandardNormal())
    assert rebind(k, None) is k
    k2 = rebind(k, Uniform(0, 1))
    assert k2.model.name == "uniform" or v_true(k2) == pytest.approx(1 / 12)

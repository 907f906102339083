import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uvlab.distributions import StandardNormal, TwoPoint, Uniform
from uvlab.empirical import EmpiricalDiff
from uvlab.kernels import make_kernel
from uvlab.measures import (
    ZERO,
    Atom,
    Density,
    PlaneDensity,
    SignedMeasure1D,
    SignedMeasure2D,
    Smooth,
    Step,
    diagonal,
    integrate2_left,
    integrate_left,
    lebesgue,
    product_measure,
    rect_mass,
)

U01 = Uniform(0, 1)
finite = st.floats(-3, 3, allow_nan=False)


def test_zero_integrand():
    m = SignedMeasure1D((Density(lambda x: np.exp(-x * x)), Atom(0.3, 2.0)))
    assert integrate_left(m, ZERO) == 0.0
    assert integrate2_left(diagonal(), ZERO, Smooth(np.sin)) == 0.0


def test_atom_uses_left_limit():
    f = Step([0.5], [3.0, 7.0])
    assert integrate_left(SignedMeasure1D((Atom(0.5, 2.0),)), f) == pytest.approx(6.0, abs=0)


def test_gini_twopoint_marginal_vanishes(rng):
    F = TwoPoint()
    m = SignedMeasure1D((Density(lambda x: 2 * F.cdf(x) - 1),))
    for _ in range(20):
        s = rng.integers(0, 2, size=int(rng.integers(1, 30))).astype(float)
        assert abs(integrate_left(m, EmpiricalDiff(s, F))) <= 1e-12


def test_linear_density_against_plugin():
    m = SignedMeasure1D((Density(lambda x: x),))
    assert integrate_left(m, EmpiricalDiff([0.0, 2.0], StandardNormal())) == pytest.approx(-0.5, abs=1e-8)


def _gini_oracle(s):
    # exact -2 * int (F_n - x)^2 dx on [0, 1] for the uniform model
    x = np.r_[0.0, np.sort(s), 1.0]
    n = len(s)
    total = 0.0
    for k in range(n + 1):
        a, b, c = x[k], x[k + 1], k / n
        total += ((b - c) ** 3 - (a - c) ** 3) / 3
    return -2 * total


def test_gini_measure_against_piecewise_oracle(rng):
    dg = diagonal(sign=-2.0)
    for n in (1, 2, 7, 40):
        s = rng.uniform(size=n)
        d = EmpiricalDiff(s, U01)
        assert integrate2_left(dg, d, d) == pytest.approx(_gini_oracle(s), abs=1e-10)


def test_product_measure_moment_identity(rng):
    dg = product_measure(lebesgue(), lebesgue(), sign=-1.0)
    F = StandardNormal()
    s = rng.standard_normal(25)
    d = EmpiricalDiff(s, F)
    assert integrate_left(lebesgue(), d) == pytest.approx(-s.mean(), abs=1e-9)
    assert integrate2_left(dg, d, d) == pytest.approx(-s.mean() ** 2, abs=1e-9)


def test_rectangles():
    H = diagonal()
    assert rect_mass(H, (0, 2, 1, 3)) == pytest.approx(1.0)
    assert rect_mass(H, (0, 1, 2, 3)) == 0.0
    gini = make_kernel("gini", StandardNormal())
    assert rect_mass(gini.dg, (0, 2, 1, 3)) == pytest.approx(-2.0)


@given(st.lists(finite, min_size=1, max_size=15))
def test_additivity(xs):
    F = StandardNormal()
    d = EmpiricalDiff(np.array(xs), F)
    c1 = (Density(lambda x: np.cos(x), kinks=(0.0,)),)
    c2 = (Atom(0.25, 1.5), Density(lambda x: x, -1.0, 2.0))
    whole = integrate_left(SignedMeasure1D(c1 + c2), d)
    parts = integrate_left(SignedMeasure1D(c1), d) + integrate_left(SignedMeasure1D(c2), d)
    assert whole == pytest.approx(parts, abs=2e-9)


@given(st.lists(finite, min_size=1, max_size=12), st.lists(finite, min_size=1, max_size=12))
def test_sign_flip_is_exact(xs, ys):
    F = StandardNormal()
    f1, f2 = EmpiricalDiff(np.array(xs), F), EmpiricalDiff(np.array(ys), F)
    m1 = SignedMeasure1D((Density(np.tanh), Atom(0.5, -2.0)))
    m2 = make_kernel("symmetry", F).dg + make_kernel("variance", F).dg
    assert integrate_left(-m1, f1) == -integrate_left(m1, f1)
    assert integrate2_left(-m2, f1, f2) == -integrate2_left(m2, f1, f2)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=10), st.lists(st.floats(-2, 2), min_size=1, max_size=10))
def test_weighted_diagonal_reduction(knots, levels):
    # a piecewise constant f: the diagonal integral equals int w f(x-)^2 mu(dx)
    knots = np.unique(np.round(knots, 6))
    levels = np.resize(np.asarray(levels), knots.size + 1)
    levels[0] = levels[-1] = 0.0  # compact support
    f = Step(knots, levels)
    w = Smooth(lambda x: 1 + x * x)
    base = SignedMeasure1D((Density(lambda x: np.exp(-np.abs(x)), kinks=(0.0,)), Atom(0.1, 0.7)))
    lhs = integrate2_left(diagonal(w, base), f, f)
    synth = SignedMeasure1D((
        Density(lambda x: (1 + x * x) * np.exp(-np.abs(x)), kinks=(0.0,)),
        Atom(0.1, 0.7 * 1.01),
    ))
    rhs = integrate_left(synth, f * f)
    assert lhs == pytest.approx(rhs, abs=1e-8)


@given(st.floats(-2, 1), st.floats(0.1, 2), st.floats(-2, 1), st.floats(0.1, 2))
def test_plane_density_rectangle(a1, w1, b1, w2):
    h = lambda x1, x2: np.exp(-(x1 * x1 + x1 * x2 + x2 * x2))
    m = SignedMeasure2D((PlaneDensity(h),))
    rect = (a1, a1 + w1, b1, b1 + w2)
    g = np.polynomial.legendre.leggauss(40)

    def tensor(a, b, c, d):
        x = (b - a) / 2 * g[0] + (a + b) / 2
        y = (d - c) / 2 * g[0] + (c + d) / 2
        return (b - a) * (d - c) / 4 * np.einsum("i,j,ij", g[1], g[1], h(x[:, None], y[None, :]))

    assert rect_mass(m, rect) == pytest.approx(tensor(*rect), abs=1e-9)

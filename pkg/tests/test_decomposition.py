from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uvlab.decomposition import (
    DegeneracyClass,
    classify_degeneracy,
    degenerate_part_forward,
    degenerate_part_ibp,
    finite_sample_degenerate,
    linear_part_forward,
    linear_part_ibp,
    scaling_identity_residual,
    verify_representation,
)
from uvlab.distributions import FivePoint, StandardNormal, TwoPoint, Uniform
from uvlab.empirical import EmpiricalDiff
from uvlab.errors import ReportedResidualExceeded
from uvlab.kernels import make_kernel
from uvlab.measures import Density, SignedMeasure1D, antidiagonal, diagonal, integrate2_left, integrate_left

N01 = StandardNormal()
U01 = Uniform(0, 1)
samples = st.lists(st.floats(-4, 4, allow_nan=False), min_size=1, max_size=40)


def test_variance_two_point_sample():
    k = make_kernel("variance", N01)
    assert linear_part_forward(k, [0, 2]) == pytest.approx(1.0)
    assert degenerate_part_forward(k, [0, 2]) == pytest.approx(-1.0)
    assert degenerate_part_ibp(k, [0, 2]) == pytest.approx(-1.0, abs=1e-6)
    rep = verify_representation(k, [0, 2])
    assert rep.direct == pytest.approx(0.0, abs=1e-15)
    assert rep.linear_ibp == pytest.approx(1.0, abs=1e-6)
    assert rep.worst <= 1e-6


def test_variance_linear_ibp_moment_oracle(rng):
    k = make_kernel("variance", N01)
    x = rng.standard_normal(30)
    d = EmpiricalDiff(x, N01)
    q = integrate_left(SignedMeasure1D((Density(lambda t: t),)), d)
    assert linear_part_ibp(k, x) == pytest.approx(-2 * q, abs=1e-9)
    assert q == pytest.approx(-0.5 * (np.mean(x * x) - 1.0), abs=1e-9)


def test_cvm_linear_parts_vanish(rng):
    k = make_kernel("cvm", U01)
    for n in (1, 5, 50):
        x = rng.uniform(size=n)
        assert linear_part_forward(k, x) == 0.0
        rep = verify_representation(k, x)
        assert rep.worst <= 1e-6
        assert degenerate_part_forward(k, x) == pytest.approx(rep.direct, abs=1e-12)


def test_gini_twopoint_linear_zero(rng):
    k = make_kernel("gini", TwoPoint())
    for _ in range(10):
        x = rng.integers(0, 2, 25).astype(float)
        assert abs(linear_part_forward(k, x)) <= 1e-12


def test_gini_degenerate_part(rng):
    k = make_kernel("gini", N01)
    x = rng.standard_normal(50)
    d = EmpiricalDiff(x, N01)
    direct = -2 * integrate2_left(diagonal(), d, d)
    assert degenerate_part_ibp(k, x) == pytest.approx(direct, abs=1e-9)
    assert degenerate_part_forward(k, x) == pytest.approx(direct, abs=1e-6)
    assert verify_representation(k, x).worst <= 1e-6


def test_symmetry_linear_ibp_zero(rng):
    k = make_kernel("symmetry", N01)
    assert linear_part_ibp(k, rng.standard_normal(20)) == 0.0


def test_symmetry_degenerate_part_stated_form(rng):
    """Diagonal minus anti-diagonal, as the catalogue states it."""
    k = make_kernel("symmetry", N01)
    x = rng.standard_normal(30)
    d = EmpiricalDiff(x, N01)
    stated = integrate2_left(diagonal(), d, d) - integrate2_left(antidiagonal(), d, d)
    assert stated == pytest.approx(degenerate_part_forward(k, x), abs=1e-6)


def test_symmetry_degenerate_part_plus_antidiagonal(rng):
    k = make_kernel("symmetry", N01)
    x = rng.standard_normal(30)
    d = EmpiricalDiff(x, N01)
    plus = integrate2_left(diagonal(), d, d) + integrate2_left(antidiagonal(), d, d)
    assert plus == pytest.approx(degenerate_part_forward(k, x), abs=1e-6)


def test_residual_contract_raises():
    k = make_kernel("variance", N01)
    bad = replace(k, v_closed=1.5)  # wrong truth breaks the forward route only
    with pytest.raises(ReportedResidualExceeded) as info:
        verify_representation(bad, [0.1, 0.4, -1.0])
    assert info.value.report is not None


def test_iid_table():
    expect = {
        ("gini", N01): "non-degenerate",
        ("variance", N01): "non-degenerate",
        ("gini", TwoPoint()): "type-1a",
        ("variance", TwoPoint()): "type-1a",
        ("cvm", N01): "type-1a",
        ("symmetry", N01): "type-1a",
        ("product", N01): "type-1a",
    }
    for (name, F), cls in expect.items():
        got = classify_degeneracy(make_kernel(name, F), regime="iid")
        assert got.asymptotic == cls, name
        assert got.scaling_exponent_p == (1 if cls == "non-degenerate" else 2)


@pytest.mark.parametrize("name,asym,p", [
    ("variance", "type-1c", 2),
    ("cvm", "type-1a", 2),
    ("sq-abs-mean", "type-1b", 2),
    ("artificial", "type-2", 3),
])
def test_longmem_rows(name, asym, p):
    got = classify_degeneracy(make_kernel(name, N01), regime="longmem(0.7)")
    assert (got.asymptotic, got.scaling_exponent_p) == (asym, p)


def test_longmem_gini_row():
    got = classify_degeneracy(make_kernel("gini", N01), regime="longmem")
    assert (got.asymptotic, got.scaling_exponent_p) == ("non-degenerate", 1)


def test_longmem_symmetry_row():
    got = classify_degeneracy(make_kernel("symmetry", N01), regime="longmem")
    assert (got.asymptotic, got.scaling_exponent_p) == ("type-2", 4)


def test_gini_linear_integral_vanishes_by_shift_invariance():
    # sum of F'(x)(2F(x) - 1) dx integrals is zero for any continuous F
    got = classify_degeneracy(make_kernel("gini", N01), regime="longmem")
    assert abs(got.integrals["L1"]) <= 1e-12
    assert got.integrals["L2"] == pytest.approx(-2 / np.sqrt(np.pi), abs=1e-9)


def test_class_rejects_degenerate_1b():
    with pytest.raises(ValueError):
        DegeneracyClass("degenerate", "type-1b", 2)


def test_non_smooth_marginal_not_classified_under_longmem():
    with pytest.raises(Exception):
        classify_degeneracy(make_kernel("gini", TwoPoint()), regime="longmem")


@given(samples)
def test_representation_property(xs):
    for name in ("gini", "variance", "symmetry", "sq-abs-mean"):
        rep = verify_representation(make_kernel(name, N01), np.array(xs))
        assert rep.worst <= 1e-6


@given(samples)
def test_degenerate_kernels_have_zero_linear_forward(xs):
    x = np.array(xs)
    assert abs(linear_part_forward(make_kernel("symmetry", N01), x)) <= 1e-12
    assert abs(linear_part_forward(make_kernel("cvm", N01), x)) <= 1e-12
    assert finite_sample_degenerate(make_kernel("symmetry", FivePoint()))


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=30))
def test_scaling_identity(xs):
    x = np.array(xs)
    n = x.size
    for name in ("gini", "variance", "symmetry"):
        k = make_kernel(name, N01)
        for a_n in (np.sqrt(n), n ** 0.2):
            assert scaling_identity_residual(k, x, a_n) <= 1e-6

"""Kernel catalogue: g, its marginals g_{i,F}, and the induced measures.

Every entry is tied to the distribution model it was built for, because the
marginals ``g_{i,F}(x) = int g(x, y) dF(y)`` and their measures depend on F.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Callable

import numpy as np

from . import _quad
from .distributions import DistributionModel, Discrete, Normal, Uniform
from .errors import MissingModelData, NoClosedFormAndDivergent, NonConvergentQuadrature
from .measures import (
    Density,
    SignedMeasure1D,
    SignedMeasure2D,
    WeightedAntiDiagonal,
    WeightedDiagonal,
    ProductOf,
    lebesgue,
    sign_density,
)

CATALOGUE = ("gini", "variance", "product", "sq-abs-mean", "cvm", "symmetry", "artificial")


@dataclass(frozen=True, eq=False)
class Kernel:
    """A kernel together with everything the decomposition needs."""

    name: str
    g: Callable
    symmetric: bool
    model: DistributionModel
    marginal_g1: Callable
    marginal_g2: Callable
    dmarginal1: SignedMeasure1D
    dmarginal2: SignedMeasure1D
    dg: SignedMeasure2D
    v_closed: float | None = None
    fast_vstat: Callable | None = None
    params: dict = field(default_factory=dict)

    def diag(self, x):
        x = np.asarray(x, dtype=float)
        return self.g(x, x)

    def v_true(self, F: DistributionModel | None = None) -> float:
        return v_true(self, F)


def _zeros(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _const(c):
    return lambda x: np.full_like(np.asarray(x, dtype=float), c)


# -- Gini's mean difference --------------------------------------------------


def _gini_vtrue(F):
    if isinstance(F, Normal):
        return 2 * F.sigma / sqrt(np.pi)
    if isinstance(F, Uniform):
        return (float(F.b) - float(F.a)) / 3
    if isinstance(F, Discrete):
        x, p = F._x, F._p
        return float(p @ np.abs(x[:, None] - x[None, :]) @ p)
    return None


def _gini_fast(x):
    xs = np.sort(x)
    n = xs.size
    i = np.arange(1, n + 1)
    return 2.0 * np.sum((2 * i - n - 1) * xs) / n**2


def gini(F: DistributionModel) -> Kernel:
    mu = F.mean

    def g(x1, x2):
        return np.abs(np.asarray(x1, float) - np.asarray(x2, float))

    def g1(x):
        x = np.asarray(x, dtype=float)
        return -mu + x + 2 * F.upper_partial_mean(x)

    dm = SignedMeasure1D((Density(lambda x: 2 * F.cdf(x) - 1, kinks=tuple(F.split_points)),))
    dg = SignedMeasure2D((WeightedDiagonal(2.0, lebesgue(), -1.0),))
    return Kernel("gini", g, True, F, g1, g1, dm, dm, dg, _gini_vtrue(F), _gini_fast)


# -- variance and the product kernel -----------------------------------------


def variance(F: DistributionModel) -> Kernel:
    mu, m2 = F.mean, float(F.moment(2))

    def g(x1, x2):
        d = np.asarray(x1, float) - np.asarray(x2, float)
        return 0.5 * d * d

    def g1(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * x * x - x * mu + 0.5 * m2

    dm = SignedMeasure1D((Density(lambda x: x - mu),))
    dg = SignedMeasure2D((ProductOf(lebesgue(), lebesgue(), -1.0),))

    def fast(x):
        return float(np.mean(x * x) - np.mean(x) ** 2)

    return Kernel("variance", g, True, F, g1, g1, dm, dm, dg, F.var, fast)


def product(F: DistributionModel) -> Kernel:
    mu = F.mean

    def g(x1, x2):
        return np.asarray(x1, float) * np.asarray(x2, float)

    def g1(x):
        return mu * np.asarray(x, dtype=float)

    dm = SignedMeasure1D((Density(_const(mu)),)) if mu != 0 else SignedMeasure1D()
    dg = SignedMeasure2D((ProductOf(lebesgue(), lebesgue(), 1.0),))
    return Kernel("product", g, True, F, g1, g1, dm, dm, dg, mu * mu, lambda x: float(np.mean(x)) ** 2)


# -- squared absolute mean ---------------------------------------------------


def sq_abs_mean(F: DistributionModel) -> Kernel:
    m = F.abs_mean()

    def g(x1, x2):
        return np.abs(np.asarray(x1, float)) * np.abs(np.asarray(x2, float))

    def g1(x):
        return m * np.abs(np.asarray(x, dtype=float))

    dm = sign_density(m)
    dg = SignedMeasure2D((ProductOf(sign_density(1.0), sign_density(1.0), 1.0),))
    return Kernel("sq-abs-mean", g, True, F, g1, g1, dm, dm, dg, m * m,
                  lambda x: float(np.mean(np.abs(x))) ** 2)


# -- Cramer-von Mises ----------------------------------------------------------


class _CvmTables:
    """Cumulative integrals in probability scale for a general weight ``w``.

    With ``u = F0(t)``: W(u) = int_u^1 w ds, WF(u) = int_u^1 w s ds and
    WF2 = int_0^1 w s^2 ds, where ``w`` is evaluated at ``F0^{-1}(s)``.
    """

    def __init__(self, F0, w, nodes=4096):
        edges = np.linspace(0.0, 1.0, nodes + 1)
        t, wt = np.polynomial.legendre.leggauss(8)
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        s = (0.5 * (a + b))[:, None] + half[:, None] * t
        ws = w(F0.ppf(s)) * half[:, None] * wt
        cell_w = ws.sum(axis=1)
        cell_ws = (ws * s).sum(axis=1)
        self.WF2 = float((ws * s * s).sum())
        self.total_w = float(cell_w.sum())
        if not np.isfinite(self.total_w):
            raise MissingModelData("weight is not integrable against F0")
        self.edges = edges
        self.W = np.r_[np.cumsum(cell_w[::-1])[::-1], 0.0]
        self.WFc = np.r_[np.cumsum(cell_ws[::-1])[::-1], 0.0]

    def upper(self, table, u):
        return np.interp(u, self.edges, table)


def cvm(F: DistributionModel, F0: DistributionModel | None = None, w: Callable | None = None) -> Kernel:
    """Weighted Cramer-von Mises kernel centred at the continuous law ``F0``."""
    F0 = F if F0 is None else F0
    if not F0.continuous or F0.max_derivative < 1:
        raise MissingModelData("the Cramer-von Mises kernel needs a continuous F0 with a density")
    unit = w is None
    wf = (lambda x: np.ones_like(np.asarray(x, dtype=float))) if unit else w
    tables = None if unit else _CvmTables(F0, wf)

    def g(x1, x2):
        u1 = F0.cdf(np.asarray(x1, dtype=float))
        u2 = F0.cdf(np.asarray(x2, dtype=float))
        if unit:
            return 1.0 / 3.0 - np.maximum(u1, u2) + 0.5 * (u1 * u1 + u2 * u2)
        W, WF = tables.W, tables.WFc
        return (tables.upper(W, np.maximum(u1, u2)) - tables.upper(WF, u1)
                - tables.upper(WF, u2) + tables.WF2)

    same = F == F0
    lo, hi = F0.tail_bounds(1e-16)

    def g1(x):
        x = np.asarray(x, dtype=float)
        if same:
            return np.zeros_like(x)
        # int w(t) (1{t >= x} - F0(t)) (F(t) - F0(t)) dF0(t)
        out = np.empty(x.size)
        for k, xi in enumerate(x.ravel()):
            h = lambda t, xi=xi: wf(t) * ((t >= xi) - F0.cdf(t)) * (F.cdf(t) - F0.cdf(t)) * F0.pdf(t)
            edges = np.r_[lo, hi, F.split_points, F0.split_points, xi]
            edges = edges[(edges >= lo) & (edges <= hi)]
            out[k] = _quad.integrate(h, edges, tol=1e-12)
        return out.reshape(x.shape)

    if same:
        dm = SignedMeasure1D()
    else:
        dm = SignedMeasure1D((Density(lambda x: -wf(x) * (F.cdf(x) - F0.cdf(x)) * F0.pdf(x),
                                      kinks=tuple(np.r_[F.split_points, F0.split_points])),))
    base = SignedMeasure1D((Density(F0.pdf, kinks=tuple(F0.split_points)),))
    dg = SignedMeasure2D((WeightedDiagonal(None if unit else wf, base, 1.0),))
    v_closed = 0.0 if same else None

    def fast(x):
        u = np.sort(F0.cdf(x))
        n = u.size
        i = np.arange(1, n + 1)
        return 1.0 / (12.0 * n * n) + float(np.sum((u - (2 * i - 1) / (2.0 * n)) ** 2)) / n

    return Kernel("cvm", g, True, F, g1, g1, dm, dm, dg, v_closed, fast if unit else None,
                  params={"F0": F0, "w": w})


# -- symmetry test -----------------------------------------------------------


def symmetry(F: DistributionModel) -> Kernel:
    """Kernel of the integrated squared symmetry statistic.

    The induced measure is the unit diagonal plus the unit anti-diagonal;
    see the second-difference check in the test suite.
    """

    def g(x1, x2):
        x1, x2 = np.asarray(x1, float), np.asarray(x2, float)
        return np.minimum(np.abs(x1), np.abs(x2)) * np.sign(x1) * np.sign(x2)

    if F.symmetric_about_zero:
        g1 = _zeros
        dm = SignedMeasure1D()
    else:
        upm0, lpm0 = float(F.upper_partial_mean(0.0)), float(F.lower_partial_mean(0.0))

        def g1(x):
            x = np.asarray(x, dtype=float)
            t = np.abs(x)
            inner = upm0 - F.upper_partial_mean(t) - lpm0 + F.lower_partial_mean(-t)
            return np.sign(x) * inner

        kinks = tuple(np.r_[0.0, F.split_points, -F.split_points])
        dm = SignedMeasure1D((Density(lambda x: 1 - F.cdf(np.abs(x)) - F.cdf(-np.abs(x)), kinks=kinks),))

    dg = SignedMeasure2D((WeightedDiagonal(None, lebesgue(), 1.0),
                          WeightedAntiDiagonal(None, lebesgue(), 1.0)))

    def fast(x):
        a = np.abs(x)
        order = np.argsort(a, kind="stable")
        a, s = a[order], np.sign(x)[order]
        tail = np.cumsum(s[::-1])[::-1] - s  # sum over strictly later indices
        return float(np.sum(a * (s * s + 2 * s * tail))) / x.size**2

    return Kernel("symmetry", g, True, F, g1, g1, dm, dm, dg,
                  0.0 if F.symmetric_about_zero else None, fast)


# -- artificial a_n^3 kernel ---------------------------------------------------


def unit_abs_mean(F: DistributionModel) -> DistributionModel:
    """Rescale ``F`` so that E|X| = 1."""
    m = F.abs_mean()
    if abs(m - 1.0) <= 1e-12:
        return F
    return F.scaled(1.0 / m)


def artificial(F: DistributionModel) -> Kernel:
    """``g(x1, x2) = x1 (|x2| - 1)``; F is rescaled to E|X| = 1 when needed."""
    if not F.symmetric_about_zero:
        raise MissingModelData("the artificial kernel needs F symmetric about zero")
    F = unit_abs_mean(F)
    m, mu = F.abs_mean(), F.mean
    if abs(m - 1.0) > 1e-9:
        raise MissingModelData(f"E|X| = {m} after rescaling")

    def g(x1, x2):
        return np.asarray(x1, float) * (np.abs(np.asarray(x2, float)) - 1.0)

    def g1(x):
        return np.asarray(x, dtype=float) * (m - 1.0)

    def g2(x):
        return mu * (np.abs(np.asarray(x, dtype=float)) - 1.0)

    dm1 = SignedMeasure1D((Density(_const(m - 1.0)),)) if m != 1.0 else SignedMeasure1D()
    dm2 = sign_density(mu) if mu != 0 else SignedMeasure1D()
    dg = SignedMeasure2D((ProductOf(lebesgue(), sign_density(1.0), 1.0),))

    def fast(x):
        return float(np.mean(x)) * (float(np.mean(np.abs(x))) - 1.0)

    return Kernel("artificial", g, False, F, g1, g2, dm1, dm2, dg, mu * (m - 1.0), fast)


_BUILDERS = {
    "gini": gini,
    "variance": variance,
    "product": product,
    "sq-abs-mean": sq_abs_mean,
    "cvm": cvm,
    "symmetry": symmetry,
    "artificial": artificial,
}


def make_kernel(name: str, F: DistributionModel, **params) -> Kernel:
    """Build catalogue entry ``name`` for the model ``F``.

    ``cvm`` accepts ``F0`` (default ``F``) and a weight ``w`` (default 1).
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown kernel {name!r}; catalogue: {', '.join(CATALOGUE)}") from None
    if params and name != "cvm":
        raise TypeError(f"kernel {name!r} takes no extra parameters")
    return builder(F, **params)


def rebind(kernel: Kernel, F: DistributionModel | None) -> Kernel:
    """The same catalogue entry built for another model."""
    if F is None or F is kernel.model or F == kernel.model:
        return kernel
    if kernel.name == "artificial" and unit_abs_mean(F) == kernel.model:
        return kernel
    return make_kernel(kernel.name, F, **kernel.params)


def v_true(kernel: Kernel, F: DistributionModel | None = None) -> float:
    """``V_g(F)``: closed form when known, otherwise ``E[g_{1,F}(X)]``."""
    kernel = rebind(kernel, F)
    if kernel.v_closed is not None:
        return float(kernel.v_closed)
    try:
        val = kernel.model.expect(kernel.marginal_g1, tol=1e-10, kinks=(0.0,))
    except NonConvergentQuadrature as exc:
        raise NoClosedFormAndDivergent(str(exc)) from exc
    if not np.isfinite(val):
        raise NoClosedFormAndDivergent(f"V_g(F) diverges for {kernel.name}")
    return float(val)

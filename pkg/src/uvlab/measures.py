"""Signed measures on the line and the plane, and left-limit integration.

A measure is stored structurally as a tuple of components (densities, atoms,
weighted diagonals, products). Integrands are ``LeftEvaluable`` objects that
know their own discontinuities, so that quadrature can split there and atoms
can pick up exact left limits instead of epsilon offsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _quad
from .errors import UnboundedTail

INF = np.inf
DEFAULT_TOL = 1e-9


# ---------------------------------------------------------------------------
# Left-evaluable integrands
# ---------------------------------------------------------------------------


class LeftEvaluable:
    """A cadlag function with a finite set of jumps.

    Attributes
    ----------
    breakpoints : ndarray
        Sorted jump locations.
    kinks : ndarray
        Extra points where the function is continuous but not smooth;
        quadrature splits there as well.
    support : (float, float)
        Interval outside of which the function is negligible. Infinite
        endpoints mean no such certificate exists.
    tail_behavior : str
        ``"compact-difference"`` when the support certificate is available,
        ``"polynomial"`` otherwise.
    """

    breakpoints: np.ndarray = np.empty(0)
    kinks: np.ndarray = np.empty(0)
    support: tuple = (-INF, INF)

    @property
    def tail_behavior(self) -> str:
        lo, hi = self.support
        return "compact-difference" if np.isfinite(lo) and np.isfinite(hi) else "polynomial"

    def eval(self, x):
        raise NotImplementedError

    def eval_left(self, x):
        raise NotImplementedError

    @property
    def split_points(self) -> np.ndarray:
        return np.union1d(self.breakpoints, self.kinks)

    def __mul__(self, other):
        return Product((self, as_left_evaluable(other)))

    __rmul__ = __mul__

    def __add__(self, other):
        return LinearCombination((self, as_left_evaluable(other)), (1.0, 1.0))

    def __sub__(self, other):
        return LinearCombination((self, as_left_evaluable(other)), (1.0, -1.0))

    def __neg__(self):
        return LinearCombination((self,), (-1.0,))


@dataclass(frozen=True, eq=False)
class Smooth(LeftEvaluable):
    """A continuous function given by a vectorised callable."""

    func: Callable
    support: tuple = (-INF, INF)
    kinks: np.ndarray = field(default_factory=lambda: np.empty(0))
    breakpoints: np.ndarray = field(default_factory=lambda: np.empty(0))

    def eval(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float) * np.ones_like(x, dtype=float)

    eval_left = eval


class Constant(Smooth):
    def __init__(self, c: float):
        object.__setattr__(self, "func", lambda x, c=float(c): np.full_like(x, c, dtype=float))
        object.__setattr__(self, "support", (-INF, INF) if c != 0 else (0.0, 0.0))
        object.__setattr__(self, "kinks", np.empty(0))
        object.__setattr__(self, "breakpoints", np.empty(0))


ZERO = Constant(0.0)


@dataclass(frozen=True, eq=False)
class Step(LeftEvaluable):
    """Right-continuous step function.

    ``levels[i]`` is the value on ``[knots[i-1], knots[i])`` with
    ``knots[-1] = -inf`` and ``knots[len] = +inf``; so ``len(levels) ==
    len(knots) + 1``.
    """

    knots: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        levels = np.asarray(self.levels, dtype=float)
        if levels.shape != (knots.size + 1,):
            raise ValueError("need len(levels) == len(knots) + 1")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "levels", levels)

    @property
    def breakpoints(self):
        return self.knots

    @property
    def support(self):
        if self.levels[0] != 0 or self.levels[-1] != 0:
            return (-INF, INF)
        if self.knots.size == 0:
            return (0.0, 0.0)
        return (float(self.knots[0]), float(self.knots[-1]))

    def eval(self, x):
        return self.levels[np.searchsorted(self.knots, x, side="right")]

    def eval_left(self, x):
        return self.levels[np.searchsorted(self.knots, x, side="left")]


@dataclass(frozen=True, eq=False)
class Product(LeftEvaluable):
    factors: tuple

    @property
    def breakpoints(self):
        return _union(f.breakpoints for f in self.factors)

    @property
    def kinks(self):
        return _union(f.kinks for f in self.factors)

    @property
    def support(self):
        lo = max(f.support[0] for f in self.factors)
        hi = min(f.support[1] for f in self.factors)
        return (lo, hi) if lo <= hi else (0.0, 0.0)

    def eval(self, x):
        out = np.ones_like(np.asarray(x, dtype=float))
        for f in self.factors:
            out = out * f.eval(x)
        return out

    def eval_left(self, x):
        out = np.ones_like(np.asarray(x, dtype=float))
        for f in self.factors:
            out = out * f.eval_left(x)
        return out


@dataclass(frozen=True, eq=False)
class LinearCombination(LeftEvaluable):
    terms: tuple
    coefs: tuple

    @property
    def breakpoints(self):
        return _union(f.breakpoints for f in self.terms)

    @property
    def kinks(self):
        return _union(f.kinks for f in self.terms)

    @property
    def support(self):
        live = [f.support for f in self.terms if f.support != (0.0, 0.0)]
        if not live:
            return (0.0, 0.0)
        return (min(s[0] for s in live), max(s[1] for s in live))

    def eval(self, x):
        return sum(c * f.eval(x) for f, c in zip(self.terms, self.coefs))

    def eval_left(self, x):
        return sum(c * f.eval_left(x) for f, c in zip(self.terms, self.coefs))


@dataclass(frozen=True, eq=False)
class _Pointwise(LeftEvaluable):
    """Integrand whose value at every point is already the one required.

    Used for the diagonal reductions, where the value at an atom must be a
    specific combination of left limits.
    """

    func: Callable
    breakpoints: np.ndarray
    kinks: np.ndarray
    support: tuple

    def eval(self, x):
        return self.func(np.asarray(x, dtype=float))

    eval_left = eval


def _union(arrays) -> np.ndarray:
    arrays = [np.asarray(a, dtype=float) for a in arrays]
    if not arrays:
        return np.empty(0)
    return np.unique(np.concatenate(arrays))


def as_left_evaluable(f) -> LeftEvaluable:
    if isinstance(f, LeftEvaluable):
        return f
    if callable(f):
        return Smooth(f)
    return Constant(float(f))


# ---------------------------------------------------------------------------
# One-dimensional measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Density:
    """``sign * h(x) dx`` restricted to ``[lo, hi]``."""

    h: Callable
    lo: float = -INF
    hi: float = INF
    sign: float = 1.0
    kinks: tuple = ()

    def negated(self):
        return Density(self.h, self.lo, self.hi, -self.sign, self.kinks)


@dataclass(frozen=True)
class Atom:
    loc: float
    weight: float
    sign: float = 1.0

    def negated(self):
        return Atom(self.loc, self.weight, -self.sign)


@dataclass(frozen=True, eq=False)
class SignedMeasure1D:
    components: tuple = ()

    def __post_init__(self):
        locs = [c.loc for c in self.components if isinstance(c, Atom)]
        if len(set(locs)) != len(locs):
            raise ValueError("atom locations must be distinct")
        object.__setattr__(self, "components", tuple(self.components))

    def __neg__(self):
        return SignedMeasure1D(tuple(c.negated() for c in self.components))

    def __add__(self, other: "SignedMeasure1D"):
        return SignedMeasure1D(self.components + other.components)

    @property
    def is_zero(self) -> bool:
        return not self.components

    def integrate_left(self, f: LeftEvaluable, tol: float = DEFAULT_TOL) -> float:
        return integrate_left(self, f, tol)

    def mass(self, lo: float, hi: float, w=None, closed_left=False, closed_right=True,
             tol: float = 1e-12) -> float:
        """Mass of the interval from ``lo`` to ``hi`` (default ``(lo, hi]``),
        optionally weighted by ``w``."""
        if not hi >= lo:
            return 0.0
        wf = as_left_evaluable(1.0 if w is None else w)
        total = 0.0
        for c in self.components:
            if isinstance(c, Atom):
                inside = (lo < c.loc < hi) or (closed_left and c.loc == lo) or (closed_right and c.loc == hi)
                if inside:
                    total +=c.sign * c.weight * float(wf.eval(np.array([c.loc]))[0])
            else:
                a, b = max(lo, c.lo), min(hi, c.hi)
                if b <= a:
                    continue
                if not (np.isfinite(a) and np.isfinite(b)):
                    raise UnboundedTail("mass of an unbounded interval under a density")
                edges = np.r_[a, b, _inside(np.r_[c.kinks, wf.split_points], a, b)]
                total += c.sign * _quad.integrate(lambda x: c.h(x) * wf.eval(x), edges, tol=tol)
        return float(total)


def _inside(points, a, b):
    points = np.asarray(points, dtype=float)
    return points[(points > a) & (points < b)]


def lebesgue() -> SignedMeasure1D:
    return SignedMeasure1D((Density(_one),))


def sign_density(scale: float = 1.0) -> SignedMeasure1D:
    """``scale * sign(x) dx`` as two half-line densities."""
    if scale == 0:
        return SignedMeasure1D()
    return SignedMeasure1D((
        Density(lambda x, s=-scale: np.full_like(x, s), -INF, 0.0),
        Density(lambda x, s=scale: np.full_like(x, s), 0.0, INF),
    ))


def density(h: Callable, lo=-INF, hi=INF, kinks=()) -> SignedMeasure1D:
    return SignedMeasure1D((Density(h, lo, hi, 1.0, tuple(kinks)),))


def _one(x):
    return np.ones_like(x, dtype=float)


def integrate_left(m: SignedMeasure1D, f: LeftEvaluable, tol: float = DEFAULT_TOL) -> float:
    """Integral of ``x -> f(x-)`` against the signed measure ``m``.

    Densities are integrated between the split points of ``f`` (and the
    density's own kinks); atoms contribute ``weight * f(loc-)``.
    """
    f = as_left_evaluable(f)
    flo, fhi = f.support
    total = 0.0
    for c in m.components:
        if isinstance(c, Atom):
            total += c.sign * c.weight * float(f.eval_left(np.array([c.loc], dtype=float))[0])
            continue
        a, b = max(c.lo, flo), min(c.hi, fhi)
        if b <= a:
            continue
        if not (np.isfinite(a) and np.isfinite(b)):
            raise UnboundedTail("integrand has no tail certificate on an unbounded density")
        edges = np.r_[a, b, _inside(np.r_[f.split_points, np.asarray(c.kinks, float)], a, b)]
        total += c.sign * _quad.integrate(lambda x, h=c.h: h(x) * f.eval(x), edges, tol=tol)
    return float(total)


# ---------------------------------------------------------------------------
# Two-dimensional measures
# ---------------------------------------------------------------------------


def _weight(w):
    if w is None:
        return Constant(1.0)
    return as_left_evaluable(w)


@dataclass(frozen=True, eq=False)
class PlaneDensity:
    """``sign * h(x1, x2) dx1 dx2`` on the box ``box``."""

    h: Callable
    sign: float = 1.0
    box: tuple = ((-INF, INF), (-INF, INF))
    kinks: tuple = ((), ())

    def negated(self):
        return PlaneDensity(self.h, -self.sign, self.box, self.kinks)


@dataclass(frozen=True, eq=False)
class WeightedDiagonal:
    """Measure on the diagonal {(x, x)} with mass ``w d base`` (the H^1_{w,mu}
    construction)."""

    w: object = None
    base: SignedMeasure1D = field(default_factory=lebesgue)
    sign: float = 1.0

    def negated(self):
        return WeightedDiagonal(self.w, self.base, -self.sign)


@dataclass(frozen=True, eq=False)
class WeightedAntiDiagonal:
    """Measure on {(x, -x)} with mass ``w d base`` in the first coordinate."""

    w: object = None
    base: SignedMeasure1D = field(default_factory=lebesgue)
    sign: float = 1.0

    def negated(self):
        return WeightedAntiDiagonal(self.w, self.base, -self.sign)


@dataclass(frozen=True, eq=False)
class ProductOf:
    m1: SignedMeasure1D
    m2: SignedMeasure1D
    sign: float = 1.0

    def negated(self):
        return ProductOf(self.m1, self.m2, -self.sign)


@dataclass(frozen=True, eq=False)
class SignedMeasure2D:
    components: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def __neg__(self):
        return SignedMeasure2D(tuple(c.negated() for c in self.components))

    def __add__(self, other: "SignedMeasure2D"):
        return SignedMeasure2D(self.components + other.components)

    def integrate2_left(self, f1, f2, tol: float = DEFAULT_TOL) -> float:
        return integrate2_left(self, f1, f2, tol)

    def rect_mass(self, rect) -> float:
        return rect_mass(self, rect)


def diagonal(w=None, base: SignedMeasure1D | None = None, sign: float = 1.0) -> SignedMeasure2D:
    return SignedMeasure2D((WeightedDiagonal(w, base if base is not None else lebesgue(), sign),))


def antidiagonal(w=None, base: SignedMeasure1D | None = None, sign: float = 1.0) -> SignedMeasure2D:
    return SignedMeasure2D((WeightedAntiDiagonal(w, base if base is not None else lebesgue(), sign),))


def product_measure(m1: SignedMeasure1D, m2: SignedMeasure1D, sign: float = 1.0) -> SignedMeasure2D:
    return SignedMeasure2D((ProductOf(m1, m2, sign),))


def integrate2_left(m: SignedMeasure2D, f1, f2, tol: float = DEFAULT_TOL) -> float:
    """Double integral of ``f1(x1-) f2(x2-)`` against ``m``."""
    f1, f2 = as_left_evaluable(f1), as_left_evaluable(f2)
    total = 0.0
    for c in m.components:
        if isinstance(c, ProductOf):
            total += c.sign * integrate_left(c.m1, f1, tol) * integrate_left(c.m2, f2, tol)
        elif isinstance(c, WeightedDiagonal):
            w = _weight(c.w)
            g = _Pointwise(
                lambda x: w.eval(x) * f1.eval_left(x) * f2.eval_left(x),
                _union([f1.breakpoints, f2.breakpoints, w.breakpoints]),
                _union([f1.kinks, f2.kinks, w.kinks]),
                Product((f1, f2, w)).support,
            )
            total += c.sign * integrate_left(c.base, g, tol)
        elif isinstance(c, WeightedAntiDiagonal):
            w = _weight(c.w)
            lo2, hi2 = f2.support
            lo = max(f1.support[0], -hi2, w.support[0])
            hi = min(f1.support[1], -lo2, w.support[1])
            g = _Pointwise(
                lambda x: w.eval(x) * f1.eval_left(x) * f2.eval_left(-x),
                _union([f1.breakpoints, -f2.breakpoints, w.breakpoints]),
                _union([f1.kinks, -f2.kinks, w.kinks]),
                (lo, hi) if lo <= hi else (0.0, 0.0),
            )
            total += c.sign * integrate_left(c.base, g, tol)
        elif isinstance(c, PlaneDensity):
            total += c.sign * _plane_integral(c, f1, f2, tol)
        else:
            raise TypeError(f"unknown component {type(c).__name__}")
    return float(total)


def _plane_integral(c: PlaneDensity, f1: LeftEvaluable, f2: LeftEvaluable, tol: float,
                    rect=None) -> float:
    (a1, b1), (a2, b2) = c.box
    a1, b1 = max(a1, f1.support[0]), min(b1, f1.support[1])
    a2, b2 = max(a2, f2.support[0]), min(b2, f2.support[1])
    if rect is not None:
        a1, b1 = max(a1, rect[0]), min(b1, rect[1])
        a2, b2 = max(a2, rect[2]), min(b2, rect[3])
    if b1 <= a1 or b2 <= a2:
        return 0.0
    if not all(np.isfinite([a1, b1, a2, b2])):
        raise UnboundedTail("plane density over an unbounded region")
    e1 = np.r_[a1, b1, _inside(np.r_[f1.split_points, c.kinks[0]], a1, b1)]
    e2 = np.r_[a2, b2, _inside(np.r_[f2.split_points, c.kinks[1]], a2, b2)]
    previous = None
    for pieces in (1, 2, 4, 8, 16, 32):
        e1r = _refine(np.unique(e1), pieces)
        e2r = _refine(np.unique(e2), pieces)
        k, g = _tensor_rule(c.h, f1, f2, e1r, e2r)
        if abs(k - g) <= tol or (previous is not None and abs(k - previous) <= tol):
            return k
        previous = k
    from .errors import NonConvergentQuadrature

    raise NonConvergentQuadrature("tensor quadrature did not converge")


def _refine(edges, pieces):
    if pieces == 1:
        return edges
    t = np.linspace(0, 1, pieces + 1)[:-1]
    a, b = edges[:-1], edges[1:]
    inner = (a[:, None] + (b - a)[:, None] * t[None, :]).ravel()
    return np.r_[inner, edges[-1]]


def _tensor_rule(h, f1, f2, e1, e2):
    def nodes(e):
        a, b = e[:-1], e[1:]
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        x = (mid[:, None] + half[:, None] * _quad.NODES[None, :]).ravel()
        wk = (half[:, None] * _quad.KRONROD[None, :]).ravel()
        wg = (half[:, None] * _quad.GAUSS[None, :]).ravel()
        return x, wk, wg

    x1, k1, g1 = nodes(e1)
    x2, k2, g2 = nodes(e2)
    v1, v2 = f1.eval(x1), f2.eval(x2)
    H = h(x1[:, None], x2[None, :])
    kk = float((k1 * v1) @ H @ (k2 * v2))
    gg = float((g1 * v1) @ H @ (g2 * v2))
    return kk, gg


def rect_mass(m: SignedMeasure2D, rect: Sequence[float]) -> float:
    """Mass of the half-open rectangle ``(a1, a2] x (b1, b2]``."""
    a1, a2, b1, b2 = map(float, rect)
    if not (a1 < a2 and b1 < b2):
        raise ValueError("need a1 < a2 and b1 < b2")
    total = 0.0
    for c in m.components:
        if isinstance(c, ProductOf):
            total += c.sign * c.m1.mass(a1, a2) * c.m2.mass(b1, b2)
        elif isinstance(c, WeightedDiagonal):
            lo, hi = max(a1, b1), min(a2, b2)
            if hi > lo:
                total += c.sign * c.base.mass(lo, hi, w=c.w)
        elif isinstance(c, WeightedAntiDiagonal):
            # x in (a1, a2] and -x in (b1, b2]  <=>  x in (a1, a2] and [-b2, -b1)
            lo, closed_left = (a1, False) if a1 >= -b2 else (-b2, True)
            hi, closed_right = (a2, True) if a2 < -b1 else (-b1, False)
            if hi > lo:
                total += c.sign * c.base.mass(lo, hi, w=c.w, closed_left=closed_left,
                                              closed_right=closed_right)
        elif isinstance(c, PlaneDensity):
            total += c.sign * _plane_integral(c, Constant(1.0), Constant(1.0), 1e-12,
                                              rect=(a1, a2, b1, b2))
        else:
            raise TypeError(f"unknown component {type(c).__name__}")
    return float(total)

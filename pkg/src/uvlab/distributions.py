"""Distribution models: cdf, derivatives, moments and samplers.

Moments are returned as exact ``Fraction`` objects whenever the parameters
are rational, so that polynomial recursions built on them stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, sqrt
from numbers import Rational

import numpy as np
from scipy import special

from . import _quad
from .errors import MissingModelData

TAIL_EPS = 1e-12


def _is_exact(*vals) -> bool:
    return all(isinstance(v, Rational) for v in vals)


def _double_factorial_odd(k: int) -> int:
    out = 1
    for j in range(k - 1, 0, -2):
        out *= j
    return out


class DistributionModel:
    """Interface shared by all distribution models.

    Subclasses provide ``cdf``, ``cdf_left``, ``derivative``, ``moment``,
    ``sample``, ``upper_partial_mean`` and the structural attributes
    ``name``, ``symmetric_about_zero``, ``continuous`` and ``max_derivative``.
    """

    name: str = "model"
    symmetric_about_zero: bool = False
    continuous: bool = True
    max_derivative: int = 0

    # -- structural helpers -------------------------------------------------
    def tail_bounds(self, eps: float = TAIL_EPS) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def split_points(self) -> np.ndarray:
        """Points where the cdf is not smooth (atoms, support edges)."""
        return np.empty(0)

    # -- moments ------------------------------------------------------------
    @property
    def mean(self) -> float:
        return float(self.moment(1))

    @property
    def var(self) -> float:
        return float(self.moment(2)) - float(self.moment(1)) ** 2

    def abs_mean(self) -> float:
        return self.expect(np.abs, kinks=(0.0,))

    def pdf(self, x):
        return self.derivative(1, x)

    def lower_partial_mean(self, x):
        """E[(x - X)_+] = integral of F over (-inf, x]."""
        x = np.asarray(x, dtype=float)
        return self.upper_partial_mean(x) - self.mean + x

    # -- integration against F ---------------------------------------------
    def expect(self, h, tol: float = 1e-11, kinks=()) -> float:
        """E[h(X)] for a vectorised function ``h``."""
        lo, hi = self.tail_bounds(1e-16)
        edges = np.concatenate([[lo, hi], self.split_points, np.asarray(kinks, float)])
        edges = edges[(edges >= lo) & (edges <= hi)]
        return _quad.integrate(lambda x: h(x) * self.pdf(x), edges, tol=tol)

    def scaled(self, c: float) -> "DistributionModel":
        raise NotImplementedError


@dataclass(frozen=True)
class Normal(DistributionModel):
    """Normal law with mean ``mu`` and variance ``variance``."""

    mu: float = 0
    variance: float = 1
    name: str = field(default="normal", compare=False)
    max_derivative: int = field(default=8, compare=False)

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    @property
    def sigma(self) -> float:
        return sqrt(float(self.variance))

    @property
    def symmetric_about_zero(self) -> bool:
        return self.mu == 0

    continuous = True

    def _z(self, x):
        return (np.asarray(x, dtype=float) - float(self.mu)) / self.sigma

    def cdf(self, x):
        return special.ndtr(self._z(x))

    cdf_left = cdf

    def sf(self, x):
        return special.ndtr(-self._z(x))

    def ppf(self, u):
        return float(self.mu) + self.sigma * special.ndtri(u)

    def derivative(self, j: int, x):
        """F^(j)(x) = (-1)^(j-1) He_{j-1}(z) phi(z) / sigma^j."""
        if j == 0:
            return self.cdf(x)
        if j > self.max_derivative:
            raise MissingModelData(f"derivative order {j} not available")
        z = self._z(x)
        he = special.eval_hermitenorm(j - 1, z)
        phi = np.exp(-0.5 * z * z) / sqrt(2 * np.pi)
        return (-1) ** (j - 1) * he * phi / self.sigma**j

    def moment(self, k: int):
        mu, v = self.mu, self.variance
        if _is_exact(mu, v):
            mu, v = Fraction(mu), Fraction(v)
        return sum(
            comb(k, 2 * i) * mu ** (k - 2 * i) * v**i * _double_factorial_odd(2 * i)
            for i in range(k // 2 + 1)
        )

    def tail_bounds(self, eps: float = TAIL_EPS):
        q = -special.ndtri(eps)
        return float(self.mu) - q * self.sigma, float(self.mu) + q * self.sigma

    def upper_partial_mean(self, x):
        z = self._z(x)
        phi = np.exp(-0.5 * z * z) / sqrt(2 * np.pi)
        return self.sigma * (phi - z * special.ndtr(-z))

    def abs_mean(self) -> float:
        s, m = self.sigma, float(self.mu)
        if m == 0:
            return s * sqrt(2 / np.pi)
        return s * sqrt(2 / np.pi) * np.exp(-m * m / (2 * s * s)) + m * (1 - 2 * special.ndtr(-m / s))

    def sample(self, rng: np.random.Generator, size):
        return float(self.mu) + self.sigma * rng.standard_normal(size)

    def scaled(self, c: float) -> "Normal":
        return Normal(self.mu * c, self.variance * c * c, name=f"{self.name}*{c:.6g}")


def StandardNormal() -> Normal:
    return Normal(0, 1, name="normal")


@dataclass(frozen=True)
class Uniform(DistributionModel):
    a: float = 0
    b: float = 1
    name: str = field(default="uniform", compare=False)

    continuous = True
    max_derivative = 1

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need a < b")

    @property
    def symmetric_about_zero(self) -> bool:
        return self.a == -self.b

    @property
    def split_points(self):
        return np.array([float(self.a), float(self.b)])

    def cdf(self, x):
        a, b = float(self.a), float(self.b)
        return np.clip((np.asarray(x, dtype=float) - a) / (b - a), 0.0, 1.0)

    cdf_left = cdf

    def ppf(self, u):
        return float(self.a) + (float(self.b) - float(self.a)) * np.asarray(u)

    def derivative(self, j: int, x):
        if j == 0:
            return self.cdf(x)
        if j > 1:
            raise MissingModelData("uniform cdf is not differentiable beyond order 1")
        x = np.asarray(x, dtype=float)
        a, b = float(self.a), float(self.b)
        return np.where((x >= a) & (x <= b), 1.0 / (b - a), 0.0)

    def moment(self, k: int):
        a, b = self.a, self.b
        if _is_exact(a, b):
            a, b = Fraction(a), Fraction(b)
        return (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a))

    def tail_bounds(self, eps: float = TAIL_EPS):
        return float(self.a), float(self.b)

    def upper_partial_mean(self, x):
        a, b = float(self.a), float(self.b)
        x = np.asarray(x, dtype=float)
        inside = (b - np.clip(x, a, b)) ** 2 / (2 * (b - a))
        return np.where(x < a, (a - x) + 0.5 * (b - a), inside)

    def sample(self, rng, size):
        return rng.uniform(float(self.a), float(self.b), size)

    def scaled(self, c: float) -> "Uniform":
        return Uniform(self.a * c, self.b * c, name=f"{self.name}*{c:.6g}")


@dataclass(frozen=True)
class Discrete(DistributionModel):
    """Finitely supported law.

    ``exact_even_powers`` may hold exact squares of the atoms, used for even
    moments; this matters for atoms like sqrt(2) whose even powers are
    rational.
    """

    values: tuple
    probs: tuple
    name: str = field(default="discrete", compare=False)
    exact_even_powers: tuple | None = field(default=None, compare=False)

    continuous = False
    max_derivative = 0

    def __post_init__(self):
        if len(self.values) != len(self.probs):
            raise ValueError("values and probs differ in length")
        order = np.argsort(np.asarray(self.values, dtype=float))
        if not np.all(np.diff(np.asarray(self.values, dtype=float)[order]) > 0):
            raise ValueError("atoms must be distinct")
        if abs(float(sum(self.probs)) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to one")

    @property
    def _x(self):
        return np.asarray(self.values, dtype=float)

    @property
    def _p(self):
        return np.asarray([float(p) for p in self.probs])

    @property
    def symmetric_about_zero(self) -> bool:
        x, p = self._x, self._p
        idx = np.argsort(x)
        return bool(
            np.allclose(x[idx], -x[idx][::-1], rtol=0, atol=1e-14)
            and np.allclose(p[idx], p[idx][::-1], rtol=0, atol=1e-14)
        )

    @property
    def split_points(self):
        return np.sort(self._x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return (x[..., None] >= self._x).astype(float) @ self._p

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        return (x[..., None] > self._x).astype(float) @ self._p

    def derivative(self, j: int, x):
        if j == 0:
            return self.cdf(x)
        raise MissingModelData(f"{self.name} has no density")

    def moment(self, k: int):
        if k % 2 == 0 and self.exact_even_powers is not None:
            return sum(Fraction(p) * Fraction(v) ** (k // 2) for v, p in zip(self.exact_even_powers, self.probs))
        if _is_exact(*self.values, *self.probs):
            return sum(Fraction(p) * Fraction(v) ** k for v, p in zip(self.values, self.probs))
        if self.symmetric_about_zero and k % 2 == 1:
            return 0
        return float(np.sum(self._p * self._x**k))

    def tail_bounds(self, eps: float = TAIL_EPS):
        return float(self._x.min()), float(self._x.max())

    def upper_partial_mean(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(self._x - x[..., None], 0.0) @ self._p

    def expect(self, h, tol: float = 1e-11, kinks=()):
        return float(np.sum(self._p * h(self._x)))

    def abs_mean(self) -> float:
        return float(np.sum(self._p * np.abs(self._x)))

    def sample(self, rng, size):
        idx = rng.choice(len(self.values), size=size, p=self._p)
        return self._x[idx]

    def scaled(self, c: float) -> "Discrete":
        even = None
        if self.exact_even_powers is not None:
            even = tuple(Fraction(v) * Fraction(c) ** 2 for v in self.exact_even_powers) if isinstance(c, Rational) else None
        return Discrete(tuple(float(v) * c for v in self.values), self.probs,
                        name=f"{self.name}*{c:.6g}", exact_even_powers=even)


def TwoPoint() -> Discrete:
    """Equal mass on 0 and 1."""
    return Discrete((0, 1), (Fraction(1, 2), Fraction(1, 2)), name="twopoint")


def FivePoint() -> Discrete:
    """Marginal of the 1-dependent sequence built from (xi, delta) coin flips.

    X = +-sqrt(2) with probability 1/8 each, +-1 with 1/4 each, 0 with 1/4.
    """
    r2 = sqrt(2.0)
    return Discrete(
        (-r2, -1.0, 0.0, 1.0, r2),
        (Fraction(1, 8), Fraction(1, 4), Fraction(1, 4), Fraction(1, 4), Fraction(1, 8)),
        name="fivepoint",
        exact_even_powers=(2, 1, 0, 1, 2),
    )


BUILTINS = {
    "normal": StandardNormal,
    "uniform": lambda: Uniform(0, 1, name="uniform"),
    "uniform-sym": lambda: Uniform(-1, 1, name="uniform-sym"),
    "twopoint": TwoPoint,
    "fivepoint": FivePoint,
}


def get_distribution(name: str) -> DistributionModel:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown distribution {name!r}; choose from {sorted(BUILTINS)}") from None


def check_model(F: DistributionModel, grid=None, tol: float = 1e-9) -> None:
    """Assert the structural properties every model must satisfy."""
    lo, hi = F.tail_bounds()
    if grid is None:
        grid = np.linspace(lo - 1, hi + 1, 2001)
    c = F.cdf(grid)
    if np.any(np.diff(c) < -1e-15):
        raise AssertionError("cdf is not non-decreasing")
    if F.cdf(np.array([lo - 1e6]))[0] > 1e-9 or F.cdf(np.array([hi + 1e6]))[0] < 1 - 1e-9:
        raise AssertionError("cdf does not tend to 0 / 1")
    if F.continuous and F.max_derivative >= 1:
        mass = _quad.integrate(F.pdf, np.r_[lo, hi, F.split_points], tol=1e-10)
        if abs(mass - 1) > 1e-6:
            raise AssertionError(f"density integrates to {mass}")
    if F.symmetric_about_zero and F.continuous and F.max_derivative >= 2:
        if np.max(np.abs(F.derivative(1, grid) - F.derivative(1, -grid))) > tol:
            raise AssertionError("F' not even")
        if np.max(np.abs(F.derivative(2, grid) + F.derivative(2, -grid))) > tol:
            raise AssertionError("F'' not odd")

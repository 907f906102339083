"""Linear long-memory processes, Appell polynomials and the corrected statistic."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np
from scipy import signal, special

from .distributions import DistributionModel, Normal, StandardNormal
from .empirical import EmpiricalDiff, Sample, as_sample, v_statistic
from .errors import ConstraintViolated, MissingMoments, UnsupportedInnovation
from .kernels import Kernel, rebind, v_true
from .measures import LeftEvaluable, Smooth, integrate2_left, integrate_left

DEFAULT_M = 2**14


# -- Appell polynomials ------------------------------------------------------


@dataclass(frozen=True)
class AppellBasis:
    """Coefficients ``coef[j][k]`` with ``A_j(x) = sum_k coef[j][k] x^k``."""

    order: int
    coef: tuple
    moments: tuple

    def evaluate(self, j: int, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in reversed(self.coef[j]):
            out = out * x + float(c)
        return out

    def mean(self, j: int, x) -> float:
        """``n^-1 sum_i A_j(X_i)``."""
        return float(np.mean(self.evaluate(j, x)))


def appell_basis(F: DistributionModel, p: int) -> AppellBasis:
    """Solve the Appell recursion degree by degree.

    The derivative condition fixes every coefficient but the constant one,
    which the zero-mean condition then determines. Exact when the moments
    are rational.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    moments = [Fraction(1)]
    for k in range(1, p + 1):
        try:
            m = F.moment(k)
        except Exception as exc:  # noqa: BLE001
            raise MissingMoments(f"moment {k} of {F.name} unavailable: {exc}") from exc
        if not isinstance(m, Fraction) and not np.isfinite(float(m)):
            raise MissingMoments(f"moment {k} of {F.name} is not finite")
        moments.append(Fraction(m) if isinstance(m, int) else m)
    coef = [(Fraction(1),)]
    for j in range(1, p + 1):
        prev = coef[-1]
        row = [0] * (j + 1)
        for k in range(1, j + 1):
            row[k] = j * prev[k - 1] / k
        row[0] = -sum(row[k] * moments[k] for k in range(1, j + 1))
        coef.append(tuple(row))
    return AppellBasis(p, tuple(coef), tuple(moments))


# -- the process -------------------------------------------------------------


@dataclass(frozen=True)
class LongMemoryConfig:
    """``X_t = sum_{s<M} a_s eps_{t-s}`` with ``a_0 = 1`` and ``a_s = s^-beta``."""

    beta: float
    M: int = DEFAULT_M
    innovation: DistributionModel = field(default_factory=StandardNormal)

    def __post_init__(self):
        if not 0.5 < self.beta < 1.0:
            raise ConstraintViolated(f"beta={self.beta} must lie strictly inside (1/2, 1)")
        if self.M < 1:
            raise ValueError("M must be positive")
        if abs(float(self.innovation.mean)) > 1e-12:
            raise ConstraintViolated("innovations must have mean zero")

    @property
    def coefficients(self) -> np.ndarray:
        a = np.ones(self.M)
        s = np.arange(1, self.M, dtype=float)
        a[1:] = s ** (-self.beta)
        return a

    @property
    def coefficient_square_sum(self) -> float:
        # smallest terms first
        return float(np.sum(self.coefficients[::-1] ** 2))

    @property
    def variance_deficit(self) -> float:
        """``sum_{s >= M} a_s^2``, the variance lost to truncation."""
        return float(special.zeta(2 * self.beta, self.M))


def simulate_linear_process(cfg: LongMemoryConfig, n: int, rng: np.random.Generator) -> Sample:
    """Draw ``n + M - 1`` innovations and return ``X_1..X_n`` via FFT convolution."""
    if n < 1:
        raise ValueError("n must be positive")
    eps = cfg.innovation.sample(rng, n + cfg.M - 1)
    return Sample(filter_innovations(cfg, eps))


def filter_innovations(cfg: LongMemoryConfig, eps) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    if cfg.M == 1:
        return eps.copy()
    return signal.fftconvolve(eps, cfg.coefficients, mode="valid")


def filter_innovations_naive(cfg: LongMemoryConfig, eps) -> np.ndarray:
    """O(nM) reference for ``filter_innovations``."""
    eps = np.asarray(eps, dtype=float)
    a = cfg.coefficients
    n = eps.size - cfg.M + 1
    out = np.empty(n)
    for t in range(n):
        window = eps[t:t + cfg.M][::-1]
        out[t] = float(np.dot(a, window))
    return out


def marginal_model(cfg: LongMemoryConfig) -> Normal:
    """Law of ``X_t``; closed form for Gaussian innovations only."""
    G = cfg.innovation
    if not isinstance(G, Normal) or G.mu != 0:
        raise UnsupportedInnovation(
            f"closed-form marginal needs centred Gaussian innovations, got {G.name}")
    var = float(G.variance) * cfg.coefficient_square_sum
    return Normal(0.0, var, name=f"linear-process(beta={cfg.beta:g},M={cfg.M})")


# -- expansion process and scaling ---------------------------------------------


def _weight(j: int, factorial_norm: bool) -> float:
    return 1.0 / factorial(j) if factorial_norm else 1.0


def appell_means(basis: AppellBasis, x, p: int, factorial_norm: bool = True) -> list[float]:
    """``[hat A_0, ..., hat A_p]`` with ``hat A_j = n^-1 sum A_j(X_i)`` (divided by j!)."""
    return [basis.mean(j, x) * _weight(j, factorial_norm) for j in range(p + 1)]


@dataclass(frozen=True, eq=False)
class ExpansionProcess(LeftEvaluable):
    """``F_n - F - sum_{j=1}^p (-1)^j F^(j) hat A_j``."""

    diff: EmpiricalDiff
    F: DistributionModel
    weights: tuple

    @property
    def breakpoints(self):
        return self.diff.breakpoints

    @property
    def kinks(self):
        return self.diff.kinks

    @property
    def support(self):
        lo, hi = self.diff.support
        if len(self.weights) > 1:
            tlo, thi = self.F.tail_bounds(1e-30)
            lo, hi = min(lo, tlo), max(hi, thi)
        return (lo, hi)

    def _correction(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for j, w in enumerate(self.weights[1:], start=1):
            if w != 0.0:
                out = out + (-1) ** j * self.F.derivative(j, x) * w
        return out

    def eval(self, x):
        return self.diff.eval(x) - self._correction(x)

    def eval_left(self, x):
        return self.diff.eval_left(x) - self._correction(x)


def expansion_process(s, F: DistributionModel, basis: AppellBasis, p: int,
                      factorial_norm: bool = True) -> ExpansionProcess:
    if p > basis.order:
        raise ValueError(f"basis of order {basis.order} cannot expand to p={p}")
    x = as_sample(s).values
    return ExpansionProcess(EmpiricalDiff(s, F), F, tuple(appell_means(basis, x, p, factorial_norm)))


@dataclass(frozen=True)
class ScalingSequence:
    p: int
    beta: float

    def value(self, n) -> float:
        return float(np.asarray(n, dtype=float) ** (self.p * (self.beta - 0.5)))


def scaling(seq: ScalingSequence, n) -> float:
    return seq.value(n)


# -- corrected V-statistic -----------------------------------------------------


def _deriv(F: DistributionModel, j: int) -> Smooth:
    lo, hi = F.tail_bounds(1e-30)
    return Smooth(lambda x: F.derivative(j, x), support=(lo, hi),
                  breakpoints=np.asarray(F.split_points, dtype=float))


def corrected_vstat(kernel: Kernel, s, F: DistributionModel | None, basis: AppellBasis,
                    p: int, q: int, r: int, tol: float = 1e-9,
                    factorial_norm: bool = True, method: str = "direct") -> float:
    """``V_g(F_n) - V_g(F)`` with the lower-order Appell terms removed.

    Every correction is an integral against ``dg_l`` or ``dg`` with
    ``hat A_j`` as coefficient. With ``factorial_norm`` the sample means of
    ``A_j`` are divided by ``j!``, matching the Hermite expansion of the
    indicator; ``factorial_norm=False`` keeps the undivided means. ``method``
    is passed to ``v_statistic``.
    """
    kernel = rebind(kernel, F)
    F = kernel.model
    top = max(p, q, r) - 1
    if top > basis.order:
        raise ValueError(f"basis of order {basis.order} too small for p,q,r={p},{q},{r}")
    s = as_sample(s)
    x = s.values
    A = appell_means(basis, x, max(top, 0), factorial_norm)
    diff = EmpiricalDiff(s, F)
    d = {j: _deriv(F, j) for j in range(1, top + 1)}
    out = v_statistic(kernel, x, method) - v_true(kernel)

    for j in range(1, p):
        lin = integrate_left(kernel.dmarginal1, d[j], tol) + integrate_left(kernel.dmarginal2, d[j], tol)
        out += (-1) ** j * A[j] * lin
    for j in range(1, q):
        out -= (-1) ** j * A[j] * integrate2_left(kernel.dg, d[j], diff, tol)
    for k in range(1, r):
        out -= (-1) ** k * A[k] * integrate2_left(kernel.dg, diff, d[k], tol)
    for j in range(1, q):
        for k in range(1, r):
            out += (-1) ** (j + k) * A[j] * A[k] * integrate2_left(kernel.dg, d[j], d[k], tol)
    return float(out)

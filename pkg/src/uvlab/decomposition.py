"""Linear and degenerate parts of ``V_g(F_n) - V_g(F)`` along two routes.

The forward route combines plug-in sums of the marginals; the
integration-by-parts route integrates ``F_n - F`` against the measures
generated by the marginals and by ``g``. Agreement of the two routes is the
runtime certificate for the representation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionModel
from .empirical import EmpiricalDiff, as_sample, v_statistic
from .errors import KernelNotClassified, ReportedResidualExceeded, UnclassifiableAtCap
from .kernels import Kernel, rebind, v_true
from .measures import Constant, LeftEvaluable, Smooth, integrate2_left, integrate_left

NONZERO = 1e-9
FINITE_DEGENERATE = 1e-12
P_CAP = 4


def _model(kernel: Kernel, F: DistributionModel | None) -> Kernel:
    return rebind(kernel, F)


# -- forward route -----------------------------------------------------------


def _plugin_means(kernel: Kernel, x: np.ndarray) -> tuple[float, float]:
    m1 = float(np.mean(kernel.marginal_g1(x)))
    m2 = m1 if kernel.marginal_g2 is kernel.marginal_g1 else float(np.mean(kernel.marginal_g2(x)))
    return m1, m2


def linear_part_forward(kernel: Kernel, s, F: DistributionModel | None = None) -> float:
    kernel = _model(kernel, F)
    x = as_sample(s).values
    m1, m2 = _plugin_means(kernel, x)
    v = v_true(kernel)
    return (m1 - v) + (m2 - v)


def degenerate_part_forward(kernel: Kernel, s, F: DistributionModel | None = None,
                            method: str = "direct") -> float:
    kernel = _model(kernel, F)
    x = as_sample(s).values
    m1, m2 = _plugin_means(kernel, x)
    return v_statistic(kernel, x, method) - m1 - m2 + v_true(kernel)


# -- integration-by-parts route ----------------------------------------------


def _phi_linear(kernel: Kernel, f: LeftEvaluable, tol: float) -> float:
    first = integrate_left(kernel.dmarginal1, f, tol)
    if kernel.dmarginal2 is kernel.dmarginal1:
        return -2.0 * first
    return -(first + integrate_left(kernel.dmarginal2, f, tol))


def _phi_quadratic(kernel: Kernel, f: LeftEvaluable, tol: float) -> float:
    return integrate2_left(kernel.dg, f, f, tol)


def linear_part_ibp(kernel: Kernel, s, F: DistributionModel | None = None, tol: float = 1e-9) -> float:
    kernel = _model(kernel, F)
    return _phi_linear(kernel, EmpiricalDiff(s, kernel.model), tol)


def degenerate_part_ibp(kernel: Kernel, s, F: DistributionModel | None = None, tol: float = 1e-9) -> float:
    kernel = _model(kernel, F)
    return _phi_quadratic(kernel, EmpiricalDiff(s, kernel.model), tol)


@dataclass(frozen=True)
class DecompositionReport:
    direct: float
    linear_forward: float
    linear_ibp: float
    degenerate_forward: float
    degenerate_ibp: float
    residual_representation: float
    residual_linear: float
    residual_degenerate: float

    @property
    def worst(self) -> float:
        return max(self.residual_representation, self.residual_linear, self.residual_degenerate)


def verify_representation(kernel: Kernel, s, F: DistributionModel | None = None,
                          tol: float = 1e-8) -> DecompositionReport:
    """Compute all four parts and check that the two routes agree.

    Raises ``ReportedResidualExceeded`` (carrying the report) when any
    residual is above ``10 * tol``.
    """
    kernel = _model(kernel, F)
    s = as_sample(s)
    x = s.values
    v_hat = v_statistic(kernel, x)
    v = v_true(kernel)
    m1, m2 = _plugin_means(kernel, x)
    lin_f = (m1 - v) + (m2 - v)
    deg_f = v_hat - m1 - m2 + v
    diff = EmpiricalDiff(s, kernel.model)
    lin_i = _phi_linear(kernel, diff, tol)
    deg_i = _phi_quadratic(kernel, diff, tol)
    direct = v_hat - v
    report = DecompositionReport(
        direct=direct,
        linear_forward=lin_f,
        linear_ibp=lin_i,
        degenerate_forward=deg_f,
        degenerate_ibp=deg_i,
        residual_representation=abs(direct - (lin_i + deg_i)),
        residual_linear=abs(lin_f - lin_i),
        residual_degenerate=abs(deg_f - deg_i),
    )
    if not np.isfinite(report.worst) or report.worst > 10 * tol:
        raise ReportedResidualExceeded(
            f"{kernel.name}: worst residual {report.worst:.3e} exceeds {10 * tol:.1e}", report)
    return report


def scaling_identity_residual(kernel: Kernel, s, a_n: float, F: DistributionModel | None = None,
                              tol: float = 1e-9) -> float:
    """|a_n (V_g(F_n) - V_g(F)) - [Phi_1(a_n D) + Phi_2(a_n D) + Phi_3(sqrt(a_n) D)]|

    with ``D = F_n - F``; the maps are evaluated on the scaled functions.
    """
    kernel = _model(kernel, F)
    s = as_sample(s)
    diff = EmpiricalDiff(s, kernel.model)
    lhs = a_n * (v_statistic(kernel, s) - v_true(kernel))
    rhs = _phi_linear(kernel, diff * Constant(a_n), tol) + _phi_quadratic(
        kernel, diff * Constant(np.sqrt(a_n)), tol)
    return abs(lhs - rhs)


# -- degeneracy taxonomy -------------------------------------------------------


@dataclass(frozen=True)
class DegeneracyClass:
    """Finite-sample and asymptotic degeneracy of ``(g, F)`` in one regime.

    ``qr`` is the pair (q, r) carrying the largest degenerate-limit integral
    at the classified order, ``integrals`` the raw limit integrals by label.
    """

    finite_sample: str
    asymptotic: str
    scaling_exponent_p: int
    qr: tuple | None = None
    integrals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.finite_sample == "degenerate" and self.asymptotic in ("type-1b", "type-1c"):
            raise ValueError("type 1b/1c requires a non-degenerate kernel")


def _regime(regime) -> tuple[str, float | None]:
    if hasattr(regime, "beta"):
        return "longmem", float(regime.beta)
    if isinstance(regime, tuple):
        return str(regime[0]), float(regime[1])
    text = str(regime).strip().lower()
    if text == "iid":
        return "iid", None
    m = re.fullmatch(r"longmem(?:\(([0-9.]+)\))?", text)
    if m:
        return "longmem", float(m.group(1)) if m.group(1) else None
    raise ValueError(f"unknown regime {regime!r}")


def _marginal_variance(F: DistributionModel, g1) -> float:
    mean = F.expect(g1, tol=1e-13, kinks=(0.0,))
    return F.expect(lambda x: (g1(x) - mean) ** 2, tol=1e-14, kinks=(0.0,))


def finite_sample_degenerate(kernel: Kernel, F: DistributionModel | None = None) -> bool:
    """True when both marginals are a.s. constant under F."""
    kernel = _model(kernel, F)
    F = kernel.model
    return all(_marginal_variance(F, g) < FINITE_DEGENERATE
               for g in {kernel.marginal_g1, kernel.marginal_g2})


def derivative_integrand(F: DistributionModel, j: int, eps: float = 1e-30) -> Smooth:
    """``x -> F^(j)(x)`` as an integrand with a tail certificate."""
    lo, hi = F.tail_bounds(eps)
    splits = np.asarray(F.split_points, dtype=float)
    return Smooth(lambda x: F.derivative(j, x), support=(lo, hi), kinks=np.empty(0),
                  breakpoints=splits)


def limit_integrals(kernel: Kernel, p: int, tol: float = 1e-10) -> dict:
    """``L_p`` and ``D_qr`` for q + r = p, q, r >= 1."""
    F = kernel.model
    d = {j: derivative_integrand(F, j) for j in range(1, p + 1)}
    out = {f"L{p}": -_phi_linear(kernel, d[p], tol)}
    for q in range(1, p):
        out[f"D{q}{p - q}"] = integrate2_left(kernel.dg, d[q], d[p - q], tol)
    return out


def classify_degeneracy(kernel: Kernel, F: DistributionModel | None = None,
                        regime="iid", cap: int = P_CAP) -> DegeneracyClass:
    """Place ``(g, F)`` in the degeneracy taxonomy.

    Under long memory the linear-limit integral ``L_p`` and the
    degenerate-limit integrals ``D_qr`` (q + r = p) are computed for
    p = 1, 2, ... until one is nonzero (``|.| > 1e-9``).
    """
    kernel = _model(kernel, F)
    kind, _ = _regime(regime)
    finite = "degenerate" if finite_sample_degenerate(kernel) else "non-degenerate"
    if kind == "iid":
        if finite == "degenerate":
            return DegeneracyClass(finite, "type-1a", 2)
        return DegeneracyClass(finite, "non-degenerate", 1)

    integrals: dict = {}
    for p in range(1, cap + 1):
        vals = limit_integrals(kernel, p)
        integrals.update(vals)
        lin = abs(vals[f"L{p}"]) > NONZERO
        deg_vals = {k: v for k, v in vals.items() if k.startswith("D")}
        deg = any(abs(v) > NONZERO for v in deg_vals.values())
        if not (lin or deg):
            continue
        qr = None
        if deg:
            best = max(deg_vals, key=lambda k: abs(deg_vals[k]))
            qr = (int(best[1]), int(best[2]))
        if p == 1:
            return DegeneracyClass(finite, "non-degenerate", 1, qr, integrals)
        if p >= 3:
            return DegeneracyClass(finite, "type-2", p, qr, integrals)
        if lin and deg:
            asym = "type-1c"
        elif lin:
            asym = "type-1b"
        else:
            asym = "type-1a"
        if finite == "degenerate" and asym != "type-1a":
            raise KernelNotClassified(
                f"{kernel.name}: linear limit integral nonzero although the marginals are constant")
        return DegeneracyClass(finite, asym, 2, qr, integrals)
    raise UnclassifiableAtCap(f"{kernel.name}: all limit integrals vanish up to p={cap}")

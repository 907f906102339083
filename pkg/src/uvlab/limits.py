"""Simulated limit laws.

Two families: functionals of an F-Brownian bridge (i.i.d. and AR(1) data)
and polynomials in the long-memory variables ``Z_1``, ``Z_2``, which are
one- and two-fold Wiener-Ito integrals discretised on a white-noise grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, sqrt
from typing import Callable

import numpy as np
from scipy import linalg, special, stats

from . import _quad
from .decomposition import classify_degeneracy, finite_sample_degenerate
from .distributions import DistributionModel, Normal
from .errors import ConstraintViolated, GridTooCoarse, KernelNotClassified, MissingModelData, UnsupportedRegime
from .kernels import Kernel, rebind
from .measures import (
    Atom,
    ProductOf,
    SignedMeasure1D,
    WeightedAntiDiagonal,
    WeightedDiagonal,
    _weight,
)

# -- normalising constant ----------------------------------------------------


def beta_integral(beta: float, tol: float = 1e-13) -> float:
    """``int_0^inf (x + x^2)^-beta dx`` by quadrature.

    Split at 1; on (0, 1) substitute ``x = t^(1/(1-beta))`` and on the tail
    ``x = 1/u``, ``u = t^(1/(2 beta - 1))``. Both integrands become smooth.
    """
    if not 0.5 < beta < 1:
        raise ConstraintViolated(f"beta={beta} outside (1/2, 1)")
    a, b = 1.0 / (1.0 - beta), 1.0 / (2.0 * beta - 1.0)
    head = _quad.integrate(lambda t: (1.0 + t**a) ** (-beta), [0.0, 1.0], tol=tol) * a
    tail = _quad.integrate(lambda t: (1.0 + t**b) ** (-beta), [0.0, 1.0], tol=tol) * b
    return head + tail


def c_constant(p: int, beta: float) -> float:
    if p < 1:
        raise ValueError("p must be a positive integer")
    if not 0.5 < beta < 1:
        raise ConstraintViolated(f"beta={beta} outside (1/2, 1)")
    if p * (2 * beta - 1) >= 1:
        raise ConstraintViolated(f"p(2 beta - 1) = {p * (2 * beta - 1):g} >= 1")
    num = factorial(p) * (1 - p * (beta - 0.5)) * (1 - p * (2 * beta - 1))
    return sqrt(num / beta_integral(beta))


# -- white-noise grid and Z simulation ---------------------------------------


@dataclass(frozen=True)
class WienerGridConfig:
    """Cells of width ``h`` on ``(L, 1]``; ``v_nodes`` Gauss points per cell in [0, 1]."""

    L: float = -50.0
    h: float = 0.01
    v_nodes: int = 4
    batch: int = 512

    def __post_init__(self):
        if not (self.L < 0 and self.h > 0):
            raise ValueError("need L < 0 and h > 0")
        cells = (1 - self.L) / self.h
        if abs(cells - round(cells)) > 1e-6 or abs(-self.L / self.h - round(-self.L / self.h)) > 1e-6:
            raise ValueError("h must divide both -L and 1")
        if round(cells) > 1_000_000:
            raise ValueError("more than 1e6 cells")

    @property
    def cells(self) -> int:
        return int(round((1 - self.L) / self.h))

    @property
    def edges(self) -> np.ndarray:
        return self.L + self.h * np.arange(self.cells + 1)

    def halved(self) -> "WienerGridConfig":
        return WienerGridConfig(self.L, self.h / 2, self.v_nodes, self.batch)


def _f1(u, beta):
    """``int_0^1 1(v > u) (v - u)^-beta dv``."""
    u = np.asarray(u, dtype=float)
    return ((1 - u) ** (1 - beta) - np.maximum(-u, 0.0) ** (1 - beta)) / (1 - beta)


def _f1_cell_means(edges, beta):
    # antiderivative of f1 in u
    def prim(u):
        return (-(1 - u) ** (2 - beta) + np.maximum(-u, 0.0) ** (2 - beta)) / ((1 - beta) * (2 - beta))

    return (prim(edges[1:]) - prim(edges[:-1])) / np.diff(edges)


def _g_cell_means(edges, v, beta):
    """Cell averages of ``u -> 1(u < v)(v - u)^-beta``; shape (len(v), cells)."""
    a, b = edges[:-1][None, :], edges[1:][None, :]
    v = np.asarray(v, dtype=float)[:, None]
    top = np.minimum(b, v)
    live = v > a
    da = np.where(live, v - a, 0.0)
    db = np.where(live, v - top, 0.0)
    return np.where(live, (da ** (1 - beta) - db ** (1 - beta)) / ((1 - beta) * (b - a)), 0.0)


@dataclass(frozen=True, eq=False)
class _ZDesign:
    beta: float
    grid: WienerGridConfig
    f1: np.ndarray            # (cells,)
    G: np.ndarray             # (K, cells), restricted to live cells
    G2: np.ndarray
    omega: np.ndarray         # (K,)
    c1: float
    c2: float | None


@lru_cache(maxsize=8)
def _design(beta: float, grid: WienerGridConfig) -> _ZDesign:
    edges = grid.edges
    f1 = _f1_cell_means(edges, beta)
    unit = edges[(edges >= 0) & (edges <= 1)]
    v, omega = _quad.gauss_legendre_grid(unit, grid.v_nodes)
    G = _g_cell_means(edges, v, beta)
    c2 = c_constant(2, beta) if 2 * (2 * beta - 1) < 1 else None
    return _ZDesign(beta, grid, f1, G, G * G, omega, c_constant(1, beta), c2)


def _z_batch(design: _ZDesign, dW: np.ndarray, p: int):
    z1 = design.c1 * (design.f1 @ dW)
    if p < 2:
        return z1, None
    S = design.G @ dW
    diag = design.G2 @ (dW * dW)
    z2 = design.c2 * 0.5 * (design.omega @ (S * S - diag))
    return z1, z2


@dataclass(frozen=True)
class SpectralConfig:
    """Eigen-expansion of the field ``S_v = int g_v dW`` on ``cells`` cells of [0, 1].

    ``Z_1`` and ``Z_2`` are the functionals ``int S_v dv`` and
    ``(1/2) int :S_v^2: dv`` of one field, so the construction needs no
    truncation of the white noise. The Hilbert-Schmidt mass missed by the
    finite basis is added to ``Z_2`` as an independent Gaussian.
    """

    cells: int = 1000
    batch: int = 4096


@dataclass(frozen=True, eq=False)
class _Spectral:
    sqrt_lam_a: np.ndarray
    lam: np.ndarray
    tail_var: float
    c1: float
    c2: float | None


@lru_cache(maxsize=8)
def _spectral(beta: float, cfg: SpectralConfig) -> _Spectral:
    I = beta_integral(beta)
    al = 1.0 - 2.0 * beta
    N = cfg.cells
    h = 1.0 / N
    k = np.arange(N, dtype=float)
    # cell-pair integrals of |v - v'|^al, which depend only on the offset
    D = (np.abs(k + 1) ** (al + 2) - 2 * k ** (al + 2) + np.abs(k - 1) ** (al + 2)) / ((al + 1) * (al + 2))
    lam, U = linalg.eigh(I * h ** (1 + al) * linalg.toeplitz(D))
    lam = np.clip(lam, 0.0, None)
    a = sqrt(h) * U.sum(axis=0)
    c2 = None
    tail = 0.0
    if 2 * al + 1 > 0:
        c2 = c_constant(2, beta)
        hs = I * I * 2.0 / ((2 * al + 1) * (2 * al + 2))
        tail = max(0.5 * (hs - float(lam @ lam)), 0.0)
    return _Spectral(np.sqrt(lam) * a, lam, tail, c_constant(1, beta), c2)


def z2_variance_exact(beta: float) -> float:
    """``Var Z_2`` of the continuum integral with the constant ``c_2``."""
    I = beta_integral(beta)
    al = 1.0 - 2.0 * beta
    return c_constant(2, beta) ** 2 * I * I / ((2 * al + 1) * (2 * al + 2))


def simulate_Z(p: int, beta: float, grid: WienerGridConfig | SpectralConfig | None = None,
               rng: np.random.Generator | None = None, size: int | None = None):
    """Draw ``(Z_1, Z_2)`` jointly.

    With a ``WienerGridConfig`` both come from one set of white-noise
    increments on the grid, diagonal cells excluded from the double
    integral; with a ``SpectralConfig`` from one draw of the eigen
    coefficients. ``Z_2`` is ``None`` when ``p == 1``. Returns scalars
    when ``size`` is None.
    """
    if p not in (1, 2):
        raise ValueError("only p in {1, 2} is supported")
    c_constant(p, beta)
    grid = grid or WienerGridConfig()
    rng = rng if rng is not None else np.random.default_rng()
    m = 1 if size is None else int(size)
    z1, z2 = np.empty(m), (np.empty(m) if p == 2 else None)
    if isinstance(grid, SpectralConfig):
        sp = _spectral(float(beta), grid)
        for start in range(0, m, grid.batch):
            stop = min(m, start + grid.batch)
            xi = rng.standard_normal((stop - start, grid.cells))
            z1[start:stop] = sp.c1 * (xi @ sp.sqrt_lam_a)
            if p == 2:
                tail = sqrt(sp.tail_var) * rng.standard_normal(stop - start)
                z2[start:stop] = sp.c2 * (0.5 * ((xi * xi - 1.0) @ sp.lam) + tail)
    else:
        design = _design(float(beta), grid)
        sd = sqrt(grid.h)
        for start in range(0, m, grid.batch):
            stop = min(m, start + grid.batch)
            dW = sd * rng.standard_normal((grid.cells, stop - start))
            a, b = _z_batch(design, dW, p)
            z1[start:stop] = a
            if p == 2:
                z2[start:stop] = b
    if size is None:
        return float(z1[0]), (None if z2 is None else float(z2[0]))
    return z1, z2


def simulate_Z_coupled(beta: float, grid: WienerGridConfig, rng: np.random.Generator, size: int):
    """``Z_1`` on ``grid`` and on the halved grid from shared increments.

    Fine increments are summed in pairs to form the coarse ones.
    """
    fine = grid.halved()
    dc, df = _design(float(beta), grid), _design(float(beta), fine)
    out_c, out_f = np.empty(size), np.empty(size)
    sd = sqrt(fine.h)
    for start in range(0, size, grid.batch):
        stop = min(size, start + grid.batch)
        dW = sd * rng.standard_normal((fine.cells, stop - start))
        out_f[start:stop] = df.c1 * (df.f1 @ dW)
        coarse = dW[0::2] + dW[1::2]
        out_c[start:stop] = dc.c1 * (dc.f1 @ coarse)
    return out_c, out_f


def z1_variance(beta: float, grid: WienerGridConfig | None = None) -> float:
    """Exact variance of the discretised ``Z_1``: ``c^2 h sum_i f1bar_i^2``."""
    grid = grid or WienerGridConfig()
    d = _design(float(beta), grid)
    return d.c1**2 * grid.h * float(d.f1 @ d.f1)


def z1_variance_continuum(beta: float, L: float, tol: float = 1e-12) -> float:
    """``c^2 int_L^1 f1(u)^2 du`` by adaptive quadrature (no cell averaging)."""
    c = c_constant(1, beta)
    edges = np.r_[np.geomspace(-L, 1e-6, 40) * -1, 0.0, 1.0 - np.geomspace(1.0, 1e-6, 20)[1:], 1.0]
    return c * c * _quad.integrate(lambda u: _f1(u, beta) ** 2, np.sort(edges), tol=tol)


def z2_variance(beta: float, grid: WienerGridConfig | None = None) -> float:
    """Exact variance of the discretised ``Z_2``."""
    grid = grid or WienerGridConfig()
    d = _design(float(beta), grid)
    gram = grid.h * (d.G @ d.G.T)
    diag = grid.h**2 * (d.G2 @ d.G2.T)
    w = d.omega
    return d.c2**2 * 0.5 * float(w @ (gram * gram - diag) @ w)


def discarded_variance(beta: float, grid: WienerGridConfig | None = None) -> float:
    """Share of ``Var Z_1 = 1`` lost by cutting the white noise at ``L``."""
    grid = grid or WienerGridConfig()
    return 1.0 - z1_variance_continuum(beta, grid.L)


def grid_halving_check(beta: float, grid: WienerGridConfig | None = None, limit: float = 0.05) -> dict:
    """Compare the discretised ``Var Z_1`` at ``h`` and ``h / 2``."""
    grid = grid or WienerGridConfig()
    coarse, fine = z1_variance(beta, grid), z1_variance(beta, grid.halved())
    rel = abs(coarse - fine) / fine
    if rel > limit:
        raise GridTooCoarse(f"Var Z_1 moves by {rel:.2%} when h is halved")
    return {"coarse": coarse, "fine": fine, "relative_change": rel}


@lru_cache(maxsize=16)
def cached_Z(beta: float, grid: WienerGridConfig | SpectralConfig, size: int, seed: int):
    """Immutable cached joint sample of ``(Z_1, Z_2)``."""
    z1, z2 = simulate_Z(2, beta, grid, np.random.default_rng(seed), size)
    z1.setflags(write=False)
    z2.setflags(write=False)
    return z1, z2


# -- limit laws --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LimitLaw:
    """A limit law with a sampler ``sampler(rng, size) -> ndarray``.

    ``kind`` is one of ``gaussian``, ``bridge_linear``, ``bridge_quadratic``
    or ``poly_in_Z``; ``terms`` lists ``(coeff, (deg_Z1, deg_Z2))`` for the
    latter, in the normalised variables ``Z_{1,beta}, Z_{2,beta}``.
    """

    kind: str
    sampler: Callable
    variance: float | None = None
    terms: tuple = ()
    info: dict = field(default_factory=dict)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray(self.sampler(rng, size), dtype=float)


@dataclass(frozen=True)
class BridgeGrid:
    """Composite Gauss-Legendre nodes between the split points of F."""

    pieces: int = 64
    per_piece: int = 16
    tail_eps: float = 1e-10


def _nodes(F: DistributionModel, grid: BridgeGrid, symmetric: bool):
    lo, hi = F.tail_bounds(grid.tail_eps)
    edges = np.r_[lo, hi, F.split_points]
    if symmetric:
        m = max(abs(lo), abs(hi))
        edges = np.r_[edges, -edges, -m, m]
        lo, hi = -m, m
    edges = np.unique(edges[(edges >= lo) & (edges <= hi)])
    t = np.linspace(0.0, 1.0, grid.pieces + 1)
    fine = np.unique((edges[:-1, None] + np.diff(edges)[:, None] * t[None, :]).ravel())
    return _quad.gauss_legendre_grid(fine, grid.per_piece)


def iid_covariance(F: DistributionModel, x: np.ndarray) -> np.ndarray:
    Fx = F.cdf(x)
    return np.minimum(Fx[:, None], Fx[None, :]) - Fx[:, None] * Fx[None, :]


def _hermite_functions(z: np.ndarray, n_terms: int) -> np.ndarray:
    """Rows ``e_n(z) = He_n(z) phi(z) / sqrt(n!)`` for n < n_terms (stable recurrence)."""
    E = np.empty((n_terms, z.size))
    E[0] = np.exp(-0.5 * z * z) / sqrt(2 * np.pi)
    if n_terms > 1:
        E[1] = z * E[0]
    for n in range(1, n_terms - 1):
        E[n + 1] = (z * E[n] - sqrt(n) * E[n - 1]) / sqrt(n + 1)
    return E


def ar1_covariance(F: Normal, rho: float, x: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    """Long-run covariance of ``1{X_0 <= x}`` for a Gaussian AR(1) with marginal F.

    Uses ``Phi2(a, b; r) - Phi(a)Phi(b) = sum_n e_n(a) e_n(b) r^(n+1) / (n+1)``
    and sums the lags geometrically; terms stop once ``|rho|^(n+1) < cutoff``.
    """
    if not isinstance(F, Normal):
        raise UnsupportedRegime("ar1 needs a Gaussian marginal")
    if not -1 < rho < 1:
        raise UnsupportedRegime("need |rho| < 1")
    base = iid_covariance(F, x)
    if rho == 0:
        return base
    n_terms = max(2, int(np.ceil(np.log(cutoff) / np.log(abs(rho)))))
    z = (x - float(F.mu)) / F.sigma
    E = _hermite_functions(z, n_terms)
    k = np.arange(1, n_terms + 1, dtype=float)
    r = rho**k
    coef = r / (k * (1 - r))
    return base + 2.0 * (E.T * coef) @ E


def ar1_covariance_direct(F: Normal, rho: float, a: float, b: float, cutoff: float = 1e-12) -> float:
    """Lag-by-lag reference: ``sum_k (Phi2(a, b; rho^k) - Phi(a) Phi(b))`` via scipy."""
    za, zb = (a - float(F.mu)) / F.sigma, (b - float(F.mu)) / F.sigma
    total = min(F.cdf(a), F.cdf(b)) - F.cdf(a) * F.cdf(b)
    k = 1
    while abs(rho) ** k >= cutoff:
        r = rho**k
        mvn = stats.multivariate_normal(mean=[0, 0], cov=[[1, r], [r, 1]])
        total += 2 * (mvn.cdf([za, zb]) - special.ndtr(za) * special.ndtr(zb))
        k += 1
    return float(total)


def _parse_regime(regime):
    if isinstance(regime, tuple):
        return regime[0], float(regime[1])
    text = str(regime).strip().lower()
    if text == "iid":
        return "iid", None
    if text.startswith("ar1"):
        inner = text[3:].strip("()= ")
        return "ar1", float(inner) if inner else 0.5
    raise UnsupportedRegime(f"bridge laws support iid and ar1(rho), not {regime!r}")


def _linear_weights(m: SignedMeasure1D, x, wq) -> np.ndarray:
    out = np.zeros_like(x)
    for c in m.components:
        if isinstance(c, Atom):
            raise MissingModelData("atoms in a marginal measure are not supported by the bridge sampler")
        inside = (x >= c.lo) & (x <= c.hi)
        out += np.where(inside, c.sign * c.h(x) * wq, 0.0)
    return out


def _quadratic_parts(kernel: Kernel, x, wq):
    """Decompose ``B -> iint B B dg`` on the nodes.

    Returns (diag weights, antidiag weights, list of (sign, l1, l2)).
    """
    diag = np.zeros_like(x)
    anti = np.zeros_like(x)
    prods = []
    for c in kernel.dg.components:
        if isinstance(c, ProductOf):
            prods.append((c.sign, _linear_weights(c.m1, x, wq), _linear_weights(c.m2, x, wq)))
        elif isinstance(c, (WeightedDiagonal, WeightedAntiDiagonal)):
            w = _weight(c.w).eval(x)
            target = diag if isinstance(c, WeightedDiagonal) else anti
            target += c.sign * w * _linear_weights(c.base, x, wq)
        else:
            raise MissingModelData(f"bridge sampler cannot handle {type(c).__name__}")
    return diag, anti, prods


def bridge_functional_law(kernel: Kernel, F: DistributionModel | None = None, regime="iid",
                          grid: BridgeGrid | None = None, degenerate: bool | None = None) -> LimitLaw:
    """Limit law of the scaled V-statistic when ``sqrt(n)(F_n - F)`` has a bridge limit.

    Non-degenerate kernels give ``-sum_i int B dg_i`` (Gaussian, variance by
    quadrature); degenerate ones give ``iint B B dg`` for ``n (V - V(F))``.
    """
    kernel = rebind(kernel, F)
    F = kernel.model
    kind, rho = _parse_regime(regime)
    grid = grid or BridgeGrid()
    anti = any(isinstance(c, WeightedAntiDiagonal) for c in kernel.dg.components)
    x, wq = _nodes(F, grid, symmetric=anti)
    cov = iid_covariance(F, x) if kind == "iid" else ar1_covariance(F, rho, x)
    if degenerate is None:
        degenerate = finite_sample_degenerate(kernel)
    info = {"regime": kind, "rho": rho, "nodes": x.size}

    if not degenerate:
        w = -(_linear_weights(kernel.dmarginal1, x, wq) + _linear_weights(kernel.dmarginal2, x, wq))
        var = float(w @ cov @ w)
        sd = sqrt(max(var, 0.0))
        return LimitLaw("gaussian", lambda rng, size: sd * rng.standard_normal(size), var, info=info)

    chol = _cholesky(cov)
    dw, aw, prods = _quadratic_parts(kernel, x, wq)
    mirror = np.arange(x.size)[::-1] if anti else None
    if anti and not np.allclose(x[mirror], -x, atol=1e-9):
        raise RuntimeError("bridge nodes are not symmetric")

    def sampler(rng, size):
        out = np.empty(size)
        for start in range(0, size, 2048):
            stop = min(size, start + 2048)
            B = rng.standard_normal((stop - start, x.size)) @ chol.T
            val = (B * B) @ dw
            if anti:
                val += (B * B[:, mirror]) @ aw
            for sign, l1, l2 in prods:
                val += sign * (B @ l1) * (B @ l2)
            out[start:stop] = val
        return out

    return LimitLaw("bridge_quadratic", sampler, info=info)


def _cholesky(cov: np.ndarray) -> np.ndarray:
    """Lower factor with the smallest jitter (at most 1e-10) that works."""
    n = cov.shape[0]
    for jitter in (0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10):
        try:
            return linalg.cholesky(cov + jitter * np.eye(n), lower=True)
        except linalg.LinAlgError:
            continue
    # semidefinite with rank deficiency, e.g. flat stretches of a discrete cdf
    vals, vecs = linalg.eigh(cov)
    if vals.min() < -1e-10 * max(1.0, vals.max()):
        raise linalg.LinAlgError("bridge covariance is not positive semidefinite")
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


# -- long-memory laws ----------------------------------------------------------


def longmem_terms(kernel: Kernel, F: DistributionModel | None = None) -> tuple[int, tuple]:
    """Classify and express the long-memory limit as a polynomial in ``Z_1, Z_2``.

    With ``hat Z_j = Z_j / c_j`` (the unnormalised multiple integrals) the
    limit of ``a_n^p (V_g(F_n) - V_g(F))`` is
    ``(-1)^(p+1) hat Z_p L_p + (-1)^p sum_{q+r=p} hat Z_q hat Z_r D_qr``.
    """
    kernel = rebind(kernel, F)
    F = kernel.model
    if not F.continuous or F.max_derivative < 2:
        raise KernelNotClassified(f"{kernel.name} under {F.name}: marginal is not smooth enough")
    cls = classify_degeneracy(kernel, regime="longmem")
    p, vals = cls.scaling_exponent_p, cls.integrals
    terms = []
    lin = vals[f"L{p}"]
    if abs(lin) > 1e-9:
        if p > 2:
            raise KernelNotClassified(f"linear term needs Z_{p}, which is not simulated")
        terms.append(((-1) ** (p + 1) * lin, (1, 0) if p == 1 else (0, 1)))
    for q in range(1, p):
        r = p - q
        d = vals[f"D{q}{r}"]
        if abs(d) <= 1e-9:
            continue
        if q > 2 or r > 2:
            raise KernelNotClassified(f"term Z_{q} Z_{r} is not simulated")
        deg = [0, 0]
        deg[q - 1] += 1
        deg[r - 1] += 1
        terms.append(((-1) ** p * d, tuple(deg)))
    return p, tuple(terms)


def longmem_limit_law(kernel: Kernel, F: DistributionModel | None, beta: float,
                      grid: WienerGridConfig | SpectralConfig | None = None) -> LimitLaw:
    """Limit of ``n^(p(beta - 1/2)) (V_g(F_n) - V_g(F))`` under long memory.

    The returned ``terms`` use the normalised ``Z_1``, ``Z_2`` (unit
    variance), so each raw coefficient is divided by the matching powers of
    ``c_1`` and ``c_2``.
    """
    grid = grid or SpectralConfig()
    p, raw = longmem_terms(kernel, F)
    need_z2 = any(deg[1] for _, deg in raw)
    c1 = c_constant(1, beta)
    c2 = c_constant(2, beta) if need_z2 else 1.0
    terms = tuple((coef / (c1 ** deg[0] * c2 ** deg[1]), deg) for coef, deg in raw)

    def sampler(rng, size):
        z1, z2 = simulate_Z(2 if need_z2 else 1, beta, grid, rng, size)
        out = np.zeros(size)
        for coef, (d1, d2) in terms:
            out += coef * z1**d1 * (z2**d2 if d2 else 1.0)
        return out

    return LimitLaw("poly_in_Z", sampler, terms=terms, info={"p": p, "beta": beta})


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    return float(stats.ks_2samp(a, b).statistic)

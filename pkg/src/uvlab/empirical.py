"""Samples, empirical distribution functions and direct U/V statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .distributions import DistributionModel
from .errors import SampleTooSmall, UnboundedWeightedTail
from .measures import LeftEvaluable

TAIL_EPS = 1e-12


class Sample:
    """An immutable one-dimensional sample with a cached sorted view."""

    __slots__ = ("values", "order", "sorted")

    def __init__(self, values):
        values = np.array(values, dtype=float).ravel()
        if values.size < 1:
            raise SampleTooSmall("a sample needs at least one observation")
        values.setflags(write=False)
        order = np.argsort(values, kind="stable")
        srt = values[order]
        srt.setflags(write=False)
        self.values = values
        self.order = order
        self.sorted = srt

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"Sample(n={self.n})"


def as_sample(s) -> Sample:
    return s if isinstance(s, Sample) else Sample(s)


class EmpiricalDiff(LeftEvaluable):
    """``x -> F_n(x) - F(x)`` with exact left limits at the order statistics."""

    def __init__(self, sample, model: DistributionModel):
        self.sample = as_sample(sample)
        self.model = model
        xs = self.sample.sorted
        self._xs = xs
        self.breakpoints = np.union1d(xs, model.split_points if not model.continuous else np.empty(0))
        self.kinks = model.split_points if model.continuous else np.empty(0)
        lo, hi = model.tail_bounds(TAIL_EPS)
        self.support = (min(lo, float(xs[0])), max(hi, float(xs[-1])))

    def ecdf(self, x):
        return np.searchsorted(self._xs, x, side="right") / self._xs.size

    def ecdf_left(self, x):
        return np.searchsorted(self._xs, x, side="left") / self._xs.size

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        return self.ecdf(x) - self.model.cdf(x)

    def eval_left(self, x):
        x = np.asarray(x, dtype=float)
        return self.ecdf_left(x) - self.model.cdf_left(x)


# ---------------------------------------------------------------------------
# U and V statistics
# ---------------------------------------------------------------------------


def _pair_matrix(kernel, x):
    return kernel.g(x[:, None], x[None, :])


def v_statistic(kernel, s, method: str = "direct") -> float:
    """V-statistic ``n^-2 sum_i sum_j g(X_i, X_j)``.

    ``method="direct"`` evaluates the full double sum; ``"fast"`` uses the
    kernel's sorted-sample formula when one exists (falls back to direct).
    """
    x = as_sample(s).values
    if method == "fast" and kernel.fast_vstat is not None:
        return float(kernel.fast_vstat(x))
    if method not in ("direct", "fast"):
        raise ValueError(f"unknown method {method!r}")
    return float(_pair_matrix(kernel, x).mean())


def u_statistic(kernel, s) -> float:
    """U-statistic averaging ``g`` over ordered pairs with distinct indices."""
    x = as_sample(s).values
    n = x.size
    if n < 2:
        raise SampleTooSmall("U-statistic needs n >= 2")
    G = _pair_matrix(kernel, x)
    return float((G.sum() - np.trace(G)) / (n * (n - 1)))


def uv_bridge_residual(kernel, s) -> float:
    """|V - ((n-1)/n) U - n^-2 sum_i g(X_i, X_i)|."""
    x = as_sample(s).values
    n = x.size
    if n < 2:
        raise SampleTooSmall("bridge needs n >= 2")
    v = v_statistic(kernel, x)
    u = u_statistic(kernel, x)
    diag = float(np.sum(kernel.g(x, x)))
    return abs(v - ((n - 1) / n) * u - diag / n**2)


# ---------------------------------------------------------------------------
# Weighted sup distance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridPolicy:
    """Evaluation policy for the weighted sup distance."""

    per_interval: int = 64
    tail_eps: float = 1e-12
    polish: bool = True


def _tail_cutoff(f: LeftEvaluable, lam: float, start: float, direction: int, eps: float) -> float:
    """Walk outward from ``start`` until the weighted value drops below eps."""
    step = max(1.0, abs(start))
    x = start
    for _ in range(200):
        x = x + direction * step
        val = abs(float(f.eval(np.array([x]))[0])) * (1 + abs(x)) ** lam
        if val < eps:
            return x
        step *= 2.0
        if abs(x) > 1e12:
            break
    raise UnboundedWeightedTail(f"weighted tail does not decay for lambda={lam}")


def weighted_sup_distance(f: LeftEvaluable, lam: float = 0.0, grid: GridPolicy | None = None) -> float:
    """``sup_x |f(x)| (1 + |x|)^lam``.

    The supremum is taken over every breakpoint (value and left limit), a
    regular grid between consecutive breakpoints, and local maximisation of
    the smooth part around the best grid cells.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    grid = grid or GridPolicy()
    weight = lambda x: (1.0 + np.abs(x)) ** lam  # noqa: E731
    bps = np.asarray(f.breakpoints, dtype=float)
    lo, hi = f.support
    if lo == hi == 0.0 and bps.size == 0:
        return 0.0
    anchor_lo = bps[0] if bps.size else (lo if np.isfinite(lo) else 0.0)
    anchor_hi = bps[-1] if bps.size else (hi if np.isfinite(hi) else 0.0)
    left = _tail_cutoff(f, lam, min(anchor_lo, lo) if np.isfinite(lo) else anchor_lo, -1, grid.tail_eps)
    right = _tail_cutoff(f, lam, max(anchor_hi, hi) if np.isfinite(hi) else anchor_hi, +1, grid.tail_eps)
    best = 0.0
    if bps.size:
        best = max(
            float(np.max(np.abs(f.eval(bps)) * weight(bps))),
            float(np.max(np.abs(f.eval_left(bps)) * weight(bps))),
        )
    edges = np.unique(np.r_[left, right, bps, f.kinks])
    edges = edges[(edges >= left) & (edges <= right)]
    t = (np.arange(grid.per_interval) + 0.5) / grid.per_interval
    a, b = edges[:-1], edges[1:]
    pts = (a[:, None] + (b - a)[:, None] * t[None, :])
    vals = np.abs(f.eval(pts.ravel())).reshape(pts.shape) * weight(pts)
    best = max(best, float(vals.max()))
    if grid.polish:
        # refine around the best grid point of the most promising intervals
        top = np.argsort(vals.max(axis=1))[-8:]
        for i in top:
            j = int(np.argmax(vals[i]))
            xl = a[i] + (b[i] - a[i]) * max(t[j] - 1.0 / grid.per_interval, 0.0)
            xr = a[i] + (b[i] - a[i]) * min(t[j] + 1.0 / grid.per_interval, 1.0)
            if xr <= xl:
                continue
            res = optimize.minimize_scalar(
                lambda x: -abs(float(f.eval(np.array([x]))[0])) * (1 + abs(x)) ** lam,
                bounds=(xl, xr), method="bounded", options={"xatol": 1e-12 * max(1.0, abs(xr))},
            )
            best = max(best, -float(res.fun))
    return best


def ks_statistic(s, model: DistributionModel) -> float:
    """Classical one-sample KS statistic from the order-statistic formula."""
    xs = as_sample(s).sorted
    n = xs.size
    u = model.cdf(xs)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))

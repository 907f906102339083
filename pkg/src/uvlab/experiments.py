"""Experiment runners behind the command line.

Every runner takes an ``ExperimentConfig`` and returns a ``ResultTable``
whose rows follow one fixed schema. Replication ``rep`` at size ``n`` draws
from ``np.random.default_rng([seed, rep, n])`` so results do not depend on
evaluation order.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from math import sqrt

import numpy as np
from scipy import signal

from . import __version__
from .decomposition import classify_degeneracy, finite_sample_degenerate, verify_representation
from .distributions import Normal, get_distribution
from .empirical import EmpiricalDiff, v_statistic, weighted_sup_distance
from .errors import (
    ClassificationMismatch,
    ConfigError,
    KernelNotClassified,
    ReportedResidualExceeded,
    UnsupportedRegime,
)
from .kernels import CATALOGUE, make_kernel, v_true
from .limits import bridge_functional_law, ks_distance, longmem_limit_law
from .longmem import (
    LongMemoryConfig,
    appell_basis,
    corrected_vstat,
    marginal_model,
    simulate_linear_process,
)

COLUMNS = ("experiment", "kernel", "dist", "regime", "n", "scaling_p", "stat", "mean", "sd",
           "q05", "q25", "q50", "q75", "q95", "ks", "residual", "seed")
EXPERIMENTS = ("verify", "weak-limit", "strong-rate", "longmem", "example21", "simulate-limit")
LIMIT_STREAM = 2**31 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    kernel: str = "variance"
    dist: str = "normal"
    regime: str = "iid"
    beta: float = 0.7
    M: int = 2**14
    rho: float = 0.5
    sizes: tuple = (100,)
    reps: int = 100
    lam: float = 0.0
    pqr: tuple | None = None
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    r: float = 0.25
    ks_max: float = 0.05
    residual_max: float = 1e-5
    shrink_min: float = 0.30
    stable_max: float = 0.25
    limit_samples: int = 20000
    enforce_classification: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if self.pqr is not None:
            object.__setattr__(self, "pqr", tuple(int(v) for v in self.pqr))
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.experiment != "example21" and self.kernel not in CATALOGUE:
            raise ConfigError(f"unknown kernel {self.kernel!r}; catalogue: {', '.join(CATALOGUE)}")
        try:
            get_distribution(self.dist)
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from None
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if not self.sizes or any(n < 1 for n in self.sizes) or list(self.sizes) != sorted(set(self.sizes)):
            raise ConfigError("sizes must be non-empty, positive and strictly ascending")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.pqr is not None and (len(self.pqr) != 3 or min(self.pqr) < 1):
            raise ConfigError("pqr needs three positive integers")
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")
        kind, _ = parse_regime(self.regime, self)
        if self.experiment in ("weak-limit",) and kind not in ("iid", "ar1"):
            raise ConfigError("weak-limit runs under iid or ar1 regimes")
        if self.experiment == "longmem" and kind != "longmem":
            raise ConfigError("longmem experiment needs regime longmem")
        if self.experiment == "strong-rate" and kind != "iid":
            raise ConfigError("strong-rate runs under the iid regime")


def parse_regime(text: str, cfg: ExperimentConfig | None = None) -> tuple[str, float | None]:
    text = str(text).strip().lower()
    if text == "iid":
        return "iid", None
    if text == "mdep-example21":
        return text, None
    m = re.fullmatch(r"(ar1|longmem)(?:\(([-+0-9.eE]+)\))?", text)
    if not m:
        raise ConfigError(f"unknown regime {text!r}; use iid, ar1(rho), longmem(beta) or mdep-example21")
    kind, arg = m.group(1), m.group(2)
    if arg is None:
        arg = (cfg.rho if kind == "ar1" else cfg.beta) if cfg is not None else (0.5 if kind == "ar1" else 0.7)
    value = float(arg)
    if kind == "ar1" and not -1 < value < 1:
        raise ConfigError("ar1 needs |rho| < 1")
    if kind == "longmem" and not 0.5 < value < 1:
        raise ConfigError("longmem needs beta in (1/2, 1)")
    return kind, value


@dataclass
class ResultTable:
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(bool(v["pass"]) for v in self.checks.values())

    def add(self, n, scaling_p, stat, values=None, ks=None, residual=None, regime=None):
        cfg = self.config
        row = {"experiment": cfg.experiment, "kernel": cfg.kernel, "dist": cfg.dist,
               "regime": regime or cfg.regime, "n": int(n), "scaling_p": scaling_p, "stat": stat}
        row.update(summarize(values if values is not None else []))
        row["ks"] = None if ks is None else float(ks)
        row["residual"] = None if residual is None else float(residual)
        row["seed"] = cfg.seed
        self.rows.append(row)
        return row

    def check(self, name: str, ok: bool, **detail):
        self.checks[name] = {"pass": bool(ok), **{k: _plain(v) for k, v in detail.items()}}

    def metadata(self) -> dict:
        import numpy
        import scipy

        return {
            "config": config_echo(self.config),
            "versions": {"uvlab": __version__, "numpy": numpy.__version__, "scipy": scipy.__version__},
            "checks": self.checks,
            "passed": self.passed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{c: _plain(row[c]) for c in COLUMNS} for row in self.rows]
        return json.dumps({"metadata": self.metadata(), "rows": rows}, indent=2, sort_keys=True) + "\n"

    def render(self) -> str:
        return self.to_json() if self.config.format == "json" else self.to_csv()


def config_echo(cfg: ExperimentConfig) -> dict:
    """Config fields that determine the results; the output path is left out."""
    data = asdict(cfg)
    data.pop("out")
    return _plain(data)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return float(f"{v:.12g}") if np.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def summarize(values) -> dict:
    x = np.asarray(values, dtype=float).ravel()
    keys = ("mean", "sd", "q05", "q25", "q50", "q75", "q95")
    if x.size == 0:
        return dict.fromkeys(keys)
    q = np.quantile(x, [0.05, 0.25, 0.5, 0.75, 0.95])
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return dict(zip(keys, [float(np.mean(x)), sd, *map(float, q)]))


def iqr(values) -> float:
    q75, q25 = np.quantile(np.asarray(values, dtype=float), [0.75, 0.25])
    return float(q75 - q25)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- shared helpers ------------------------------------------------------------


def _rng(cfg: ExperimentConfig, rep: int, n: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, rep, n])


def _kernel_for(cfg: ExperimentConfig, F=None):
    F = F if F is not None else get_distribution(cfg.dist)
    return make_kernel(cfg.kernel, F)


def ar1_path(n: int, rho: float, rng: np.random.Generator, F: Normal) -> np.ndarray:
    """Stationary Gaussian AR(1) with marginal F."""
    eps = rng.standard_normal(n)
    eps[0] /= sqrt(1 - rho * rho)
    z = signal.lfilter([sqrt(1 - rho * rho)], [1.0, -rho], eps)
    return float(F.mu) + F.sigma * z


# -- runners -----------------------------------------------------------------


def run_verify(cfg: ExperimentConfig) -> ResultTable:
    """Both evaluation routes on many samples; fails if any residual exceeds the bound."""
    kernel = _kernel_for(cfg)
    F = kernel.model
    kind, rho = parse_regime(cfg.regime, cfg)
    table = ResultTable(cfg)
    worst_all = 0.0
    for n in cfg.sizes:
        parts = {k: [] for k in ("direct", "linear_forward", "linear_ibp", "degenerate_forward",
                                 "degenerate_ibp", "residual_representation", "d_phi")}
        worst = 0.0
        for rep in range(cfg.reps):
            rng = _rng(cfg, rep, n)
            if kind == "ar1":
                x = ar1_path(n, rho, rng, F)
            elif kind == "iid":
                x = F.sample(rng, n)
            else:
                raise UnsupportedRegime(f"verify draws iid or ar1 samples, not {kind}")
            try:
                rep_ = verify_representation(kernel, x, tol=cfg.residual_max / 100)
            except ReportedResidualExceeded as exc:
                rep_ = exc.report
            for k in parts:
                if k != "d_phi":
                    parts[k].append(getattr(rep_, k))
            parts["d_phi"].append(weighted_sup_distance(EmpiricalDiff(x, F), cfg.lam))
            worst = max(worst, rep_.worst)
        for k, vals in parts.items():
            table.add(n, 0, k, vals, residual=worst if k == "residual_representation" else None)
        worst_all = max(worst_all, worst)
    table.check("residual", worst_all <= cfg.residual_max, max_residual=worst_all, bound=cfg.residual_max)
    return table


def _scaled_iid_stat(kernel, x, v0, n, degenerate):
    diff = v_statistic(kernel, x, "fast") - v0
    return n * diff if degenerate else sqrt(n) * diff


def run_weak_limit(cfg: ExperimentConfig) -> ResultTable:
    """Monte Carlo law of the scaled statistic against the bridge limit law."""
    kernel = _kernel_for(cfg)
    F = kernel.model
    kind, rho = parse_regime(cfg.regime, cfg)
    regime = "iid" if kind == "iid" else ("ar1", rho)
    degenerate = finite_sample_degenerate(kernel)
    law = bridge_functional_law(kernel, regime=regime, degenerate=degenerate)
    limit = law.sample(np.random.default_rng([cfg.seed, LIMIT_STREAM]), cfg.limit_samples)
    v0 = v_true(kernel)
    p = 2 if degenerate else 1
    table = ResultTable(cfg)
    ks_last = None
    for n in cfg.sizes:
        vals = np.empty(cfg.reps)
        for rep in range(cfg.reps):
            rng = _rng(cfg, rep, n)
            x = ar1_path(n, rho, rng, F) if kind == "ar1" else F.sample(rng, n)
            vals[rep] = _scaled_iid_stat(kernel, x, v0, n, degenerate)
        ks_last = ks_distance(vals, limit)
        table.add(n, p, "scaled_vstat", vals, ks=ks_last)
    table.add(cfg.sizes[-1], p, "limit_law", limit)
    table.check("ks_vs_limit", ks_last <= cfg.ks_max, ks=ks_last, bound=cfg.ks_max,
                law=law.kind, law_variance=law.variance)
    return table


def run_strong_rate(cfg: ExperimentConfig) -> ResultTable:
    """``n^r |V_g(F_n) - V_g(F)|`` along single sample paths.

    Degenerate kernels use the exponent ``2r``.
    """
    kernel = _kernel_for(cfg)
    F = kernel.model
    degenerate = finite_sample_degenerate(kernel)
    expo = cfg.r * (2 if degenerate else 1)
    v0 = v_true(kernel)
    sizes = cfg.sizes
    paths = np.empty((cfg.reps, len(sizes)))
    for rep in range(cfg.reps):
        x = F.sample(np.random.default_rng([cfg.seed, rep]), sizes[-1])
        for j, n in enumerate(sizes):
            paths[rep, j] = n**expo * abs(v_statistic(kernel, x[:n], "fast") - v0)
    table = ResultTable(cfg)
    scale_p = 2 if degenerate else 1
    for j, n in enumerate(sizes):
        table.add(n, scale_p, "scaled_abs_error", paths[:, j])
    tail = paths[:, len(sizes) // 2:]
    table.add(sizes[-1], scale_p, "tail_max", tail.max(axis=1))
    logn = np.log(np.asarray(sizes, dtype=float))
    slopes = [np.polyfit(logn, np.log(np.maximum(row, 1e-300)), 1)[0] for row in paths] if len(sizes) > 1 else [0.0]
    table.add(sizes[-1], scale_p, "loglog_slope", slopes)
    med = np.median(paths, axis=0)
    table.check("median_decreases", med[-1] < med[0], medians=med.tolist(), exponent=expo,
                monotone=bool(np.all(np.diff(med) < 0)))
    return table


def _default_pqr(cls) -> tuple[int, int, int]:
    p = cls.scaling_exponent_p
    q, r = cls.qr if cls.qr is not None else (1, max(p - 1, 1))
    return p, q, r


def run_longmem(cfg: ExperimentConfig) -> ResultTable:
    """Corrected statistic under a linear long-memory process at scalings 1..p."""
    _, beta = parse_regime(cfg.regime, cfg)
    lm = LongMemoryConfig(beta, cfg.M)
    F = marginal_model(lm)
    kernel = make_kernel(cfg.kernel, F)
    scale = kernel.model.abs_mean() / F.abs_mean() if kernel.model is not F else 1.0
    cls = classify_degeneracy(kernel, regime="longmem")
    p, q, r = cfg.pqr if cfg.pqr is not None else _default_pqr(cls)
    if cfg.enforce_classification and p != cls.scaling_exponent_p:
        raise ClassificationMismatch(
            f"{cfg.kernel}: requested p={p} but the limit integrals give p={cls.scaling_exponent_p} "
            f"({cls.asymptotic}); integrals {cls.integrals}")
    basis = appell_basis(kernel.model, max(p, q, r))
    law_sample = None
    if p == cls.scaling_exponent_p:
        try:
            law = longmem_limit_law(kernel, None, beta)
            law_sample = law.sample(np.random.default_rng([cfg.seed, LIMIT_STREAM]), cfg.limit_samples)
        except KernelNotClassified:
            law_sample = None
    table = ResultTable(cfg)
    per_power = {s: [] for s in range(1, p + 1)}
    for n in cfg.sizes:
        T = np.empty(cfg.reps)
        for rep in range(cfg.reps):
            x = simulate_linear_process(lm, n, _rng(cfg, rep, n)).values * scale
            T[rep] = corrected_vstat(kernel, x, None, basis, p, q, r, method="fast")
        for s in range(1, p + 1):
            vals = n ** (s * (beta - 0.5)) * T
            ks = ks_distance(vals, law_sample) if (s == p and law_sample is not None) else None
            table.add(n, s, f"scaled_p{s}", vals, ks=ks, regime=f"longmem({beta:g})")
            per_power[s].append(iqr(vals))
    if law_sample is not None:
        table.add(cfg.sizes[-1], p, "limit_law", law_sample, regime=f"longmem({beta:g})")
    if len(cfg.sizes) > 1:
        for s in range(1, p):
            shrink = 1 - per_power[s][-1] / per_power[s][0]
            table.check(f"collapse_p{s}", shrink >= cfg.shrink_min, shrink=shrink, iqr=per_power[s])
        change = abs(per_power[p][-1] / per_power[p][0] - 1)
        table.check(f"stable_p{p}", change <= cfg.stable_max, change=change, iqr=per_power[p])
    table.checks.setdefault("classification", {
        "pass": p == cls.scaling_exponent_p, "classified_p": cls.scaling_exponent_p,
        "asymptotic": cls.asymptotic, "pqr": [p, q, r]})
    return table


def example21_path(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(X, Z, xi)`` of the 1-dependent construction; ``xi`` has length n + 1."""
    xi = rng.integers(0, 2, n + 1)
    delta = rng.integers(0, 2, n)
    Z = xi[1:] - xi[:-1]
    r2 = sqrt(2.0)
    X = np.where(Z == 1, np.where(delta == 1, r2, -r2),
                 np.where(Z == 0, np.where(delta == 1, 1.0, -1.0), 0.0))
    return X, Z, xi


EXAMPLE21_ATOL = 1e-15


def run_example21(cfg: ExperimentConfig) -> ResultTable:
    """Sample variance of the 1-dependent sequence: type 1c behaviour."""
    table = ResultTable(replace(cfg, kernel="variance", dist="fivepoint"))
    iqr_sqrt, iqr_lin = [], []
    worst_identity = worst_decomp = 0.0
    for n in cfg.sizes:
        s_sqrt, s_lin = np.empty(cfg.reps), np.empty(cfg.reps)
        path_mean, path_second = np.empty(cfg.reps), np.empty(cfg.reps)
        for rep in range(cfg.reps):
            X, Z, xi = example21_path(n, _rng(cfg, rep, n))
            worst_identity = max(worst_identity, float(np.max(np.abs(X * X - 1.0 - Z))))
            path_mean[rep], path_second[rep] = np.mean(X), np.mean(X * X)
            var_hat = float(path_second[rep] - path_mean[rep] ** 2)
            decomp = (xi[-1] - xi[0]) / n - path_mean[rep] ** 2
            worst_decomp = max(worst_decomp, abs(var_hat - 1.0 - decomp))
            s_sqrt[rep] = sqrt(n) * (var_hat - 1.0)
            s_lin[rep] = n * (var_hat - 1.0)
        table.add(n, 1, "sqrt_n_scaled_variance", s_sqrt, regime="mdep-example21")
        table.add(n, 2, "n_scaled_variance", s_lin, regime="mdep-example21")
        iqr_sqrt.append(iqr(s_sqrt))
        iqr_lin.append(iqr(s_lin))
    # moments from the independent paths at the largest size; SEs from their spread
    R = cfg.reps
    mean, se_mean = float(path_mean.mean()), float(path_mean.std(ddof=1) / sqrt(R)) if R > 1 else float("inf")
    second, se_var = float(path_second.mean()), float(path_second.std(ddof=1) / sqrt(R)) if R > 1 else float("inf")
    table.check("mean_zero", abs(mean) <= 4 * se_mean, mean=mean, se=se_mean, draws=R * cfg.sizes[-1])
    table.check("variance_one", abs(second - 1.0) <= 4 * se_var, second_moment=second, se=se_var)
    table.check("identity", worst_identity <= EXAMPLE21_ATOL, max_abs=worst_identity, atol=EXAMPLE21_ATOL)
    table.check("hoeffding_identity", worst_decomp <= 1e-12, max_abs=worst_decomp)
    if len(cfg.sizes) > 1:
        shrink = 1 - iqr_sqrt[-1] / iqr_sqrt[0]
        change = abs(iqr_lin[-1] / iqr_lin[0] - 1)
        table.check("sqrt_n_collapse", shrink >= cfg.shrink_min, shrink=shrink, iqr=iqr_sqrt)
        table.check("n_stable", change <= cfg.stable_max, change=change, iqr=iqr_lin)
    return table


def limit_law_for(cfg: ExperimentConfig):
    kind, value = parse_regime(cfg.regime, cfg)
    if kind == "longmem":
        F = marginal_model(LongMemoryConfig(value, cfg.M))
        return longmem_limit_law(make_kernel(cfg.kernel, F), None, value)
    kernel = _kernel_for(cfg)
    regime = "iid" if kind == "iid" else ("ar1", value)
    return bridge_functional_law(kernel, regime=regime)


def run_simulate_limit(cfg: ExperimentConfig) -> np.ndarray:
    law = limit_law_for(cfg)
    return law.sample(np.random.default_rng([cfg.seed, LIMIT_STREAM]), cfg.reps)


RUNNERS = {
    "verify": run_verify,
    "weak-limit": run_weak_limit,
    "strong-rate": run_strong_rate,
    "longmem": run_longmem,
    "example21": run_example21,
}


def config_from_mapping(data: dict) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc

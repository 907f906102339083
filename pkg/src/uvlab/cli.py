"""Command line entry point: ``uvlab <experiment> [flags]``.

Exit codes: 0 when every check passes, 2 when a check fails, 3 for
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
import yaml

from .errors import ClassificationMismatch, ConfigError, UVLabError
from .experiments import (
    EXPERIMENTS,
    RUNNERS,
    ExperimentConfig,
    config_echo,
    config_from_mapping,
    run_simulate_limit,
    write_atomic,
)
from .kernels import CATALOGUE

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 2, 3

# flag dest -> config field
FLAGS = {
    "kernel": "kernel", "dist": "dist", "regime": "regime", "beta": "beta", "M": "M",
    "rho": "rho", "sizes": "sizes", "reps": "reps", "pqr": "pqr", "lam": "lam", "r": "r",
    "seed": "seed", "out": "out", "format": "format", "ks_max": "ks_max",
    "limit_samples": "limit_samples", "enforce_classification": "enforce_classification",
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 3), not check failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON or YAML file with ExperimentConfig keys")
    common.add_argument("--kernel", help=f"one of: {', '.join(CATALOGUE)}")
    common.add_argument("--dist", help="normal, uniform, uniform-sym, twopoint or fivepoint")
    common.add_argument("--regime", help="iid, ar1(rho), longmem(beta) or mdep-example21")
    common.add_argument("--beta", type=float)
    common.add_argument("--M", type=int, help="truncation lag of the linear process")
    common.add_argument("--rho", type=float)
    common.add_argument("--sizes", type=_int_list, help="ascending sample sizes, e.g. 500,4000")
    common.add_argument("--reps", type=int)
    common.add_argument("--pqr", type=_int_list, help="p,q,r of the corrected statistic")
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--r", type=float, help="rate exponent for strong-rate")
    common.add_argument("--ks-max", dest="ks_max", type=float)
    common.add_argument("--limit-samples", dest="limit_samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--skip-classification-check", dest="enforce_classification",
                        action="store_false", default=None,
                        help="run longmem at a p that differs from the classified one")

    parser = _Parser(prog="uvlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    return parser


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping")
    return data


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data = load_config_file(args.config) if args.config else {}
    data.pop("experiment", None)
    for dest, key in FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            data[key] = value
    data["experiment"] = args.experiment
    default_regime = {"example21": "mdep-example21", "longmem": "longmem"}
    if args.experiment in default_regime:
        data.setdefault("regime", default_regime[args.experiment])
    return config_from_mapping(data)


def _emit(cfg: ExperimentConfig, text: str) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def _render_samples(cfg: ExperimentConfig, samples: np.ndarray) -> str:
    if cfg.format == "json":
        body = {"metadata": {"config": config_echo(cfg)}, "samples": [float(f"{v:.12g}") for v in samples]}
        return json.dumps(body, indent=2, sort_keys=True) + "\n"
    return "sample\n" + "".join(f"{v:.12g}\n" for v in samples)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.experiment == "simulate-limit":
            _emit(cfg, _render_samples(cfg, run_simulate_limit(cfg)))
            return EXIT_PASS
        table = RUNNERS[cfg.experiment](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ClassificationMismatch as exc:
        print(f"classification mismatch: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except UVLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(cfg, table.render())
    for name, detail in table.checks.items():
        status = "pass" if detail["pass"] else "FAIL"
        print(f"[{status}] {name}", file=sys.stderr)
    return EXIT_PASS if table.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

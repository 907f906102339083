"""IQR collapse diagnostics for the long-memory scaling powers.

Runs the longmem experiment for several kernels and truncation lags M and
prints the per-power IQR shrink/change between the smallest and largest n.

    python scripts/collapse_study.py --reps 300 --M 16384 262144
"""

import argparse

from uvlab.experiments import ExperimentConfig, run_longmem

KERNELS = {"variance": (2, 1, 1), "symmetry": (4, 2, 2), "artificial": (3, 1, 2)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=0.7)
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 4000])
    ap.add_argument("--reps", type=int, default=300)
    ap.add_argument("--M", type=int, nargs="+", default=[2**14])
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()
    print("kernel,M,check,pass,value")
    for M in args.M:
        for name, pqr in KERNELS.items():
            cfg = ExperimentConfig("longmem", kernel=name, regime=f"longmem({args.beta})", M=M,
                                   sizes=tuple(args.sizes), reps=args.reps, pqr=pqr, seed=args.seed,
                                   limit_samples=2000, enforce_classification=False)
            for check, d in run_longmem(cfg).checks.items():
                value = d.get("shrink", d.get("change", d.get("classified_p")))
                print(f"{name},{M},{check},{d['pass']},{value}")


if __name__ == "__main__":
    main()

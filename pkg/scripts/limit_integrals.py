"""Print the long-memory limit integrals L_p and D_qr for every catalogue kernel.

    python scripts/limit_integrals.py --cap 4
"""

import argparse

from uvlab.decomposition import classify_degeneracy, limit_integrals
from uvlab.distributions import StandardNormal
from uvlab.errors import UVLabError
from uvlab.kernels import CATALOGUE, make_kernel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cap", type=int, default=4)
    args = ap.parse_args()
    F = StandardNormal()
    for name in CATALOGUE:
        k = make_kernel(name, F)
        try:
            cls = classify_degeneracy(k, regime="longmem")
            label = f"{cls.asymptotic}, p={cls.scaling_exponent_p}"
        except UVLabError as exc:
            label = type(exc).__name__
        print(f"{name}: {label}")
        for p in range(1, args.cap + 1):
            vals = limit_integrals(k, p)
            print("   p=%d  " % p + "  ".join(f"{key}={v:+.6f}" for key, v in vals.items()))


if __name__ == "__main__":
    main()

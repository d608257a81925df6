#!/usr/bin/env python3
"""Sweep objective gaps and compare the fitted decay rate against c_0 - c_1.

Prints a CSV table (gap, fitted_rate, rel_err, t_final) to stdout.
"""

import argparse

import numpy as np

from simplexgeo.flows import LinearObjective, solve_lp
from simplexgeo.sequence_core import random_simplex_point


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--gaps", type=float, nargs="+", default=[0.1, 0.25, 0.5, 1.0, 2.0])
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print("gap,fitted_rate,rel_err,t_final")
    for gap in args.gaps:
        c = -gap * np.arange(args.dim, dtype=float)
        p0 = random_simplex_point(rng, args.dim)
        _, report = solve_lp(LinearObjective(c), p0, tol=args.tol)
        print(f"{gap},{report.rate},{report.rate_rel_err},{report.t_final}")


if __name__ == "__main__":
    main()

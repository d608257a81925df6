#!/usr/bin/env python3
"""Refinement table: how truncation-level quantities settle as N doubles.

For geometric families, prints the change in Fisher-Rao distance,
objective value, and solved LP limit between truncation N and 2N,
next to the analytic tail bound r^N / (1 - r).
"""

import argparse

import numpy as np

from simplexgeo.flows import LinearObjective, objective_value, solve_lp
from simplexgeo.metrics import fr_distance
from simplexgeo.sequence_core import SequenceSpec, make_simplex_point


def geometric(dim, ratio):
    return make_simplex_point(SequenceSpec("geometric", dim, ratio=ratio))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.3, 0.5, 0.9])
    ap.add_argument("--dims", type=int, nargs="+", default=[8, 16, 32])
    args = ap.parse_args()

    print(f"{'r':>5} {'N':>4} {'tail_bound':>12} {'d_dist':>12} {'d_obj':>12} {'d_lp':>12}")
    for r in args.ratios:
        for n in args.dims:
            bound = r**n / (1.0 - r)
            d_n = fr_distance(geometric(n, r), geometric(n, r**3))
            d_2n = fr_distance(geometric(2 * n, r), geometric(2 * n, r**3))
            f_n = objective_value(LinearObjective(r ** np.arange(n)), geometric(n, r))
            f_2n = objective_value(LinearObjective(r ** np.arange(2 * n)), geometric(2 * n, r))
            lim_n, _ = solve_lp(LinearObjective(r ** np.arange(n)), geometric(n, r), tol=1e-12)
            lim_2n, _ = solve_lp(
                LinearObjective(r ** np.arange(2 * n)), geometric(2 * n, r), tol=1e-12
            )
            padded = np.zeros(2 * n)
            padded[:n] = lim_n.coords
            d_lp = np.abs(padded - lim_2n.coords).sum()
            print(
                f"{r:>5} {n:>4} {bound:>12.3e} {abs(d_n - d_2n):>12.3e} "
                f"{abs(f_n - f_2n):>12.3e} {d_lp:>12.3e}"
            )


if __name__ == "__main__":
    main()

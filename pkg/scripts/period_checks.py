"""Exhaustively check the closed-form periods of all three distinguishers.

    python3 scripts/period_checks.py --ns 4 6 8 --trials 100

Prints, per structure and width, how many instances had f(x) = f(x ^ s) for
every x and how often the constants had to be redrawn because s was zero.
"""

import argparse

import numpy as np

from fbcq.cipher import CipherParams, KeySchedule
from fbcq.distinguishers import STRUCTURES
from fbcq.experiments import draw_nondegenerate, trial_rng
from fbcq.oracle import CipherOracle


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--ns", type=int, nargs="+", default=[4, 6, 8])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'structure':<11} {'n':>3} {'periodic':>9} {'redraws':>8}")
    for name, (variant, rounds, build) in STRUCTURES.items():
        for n in args.ns:
            xs = np.arange(1 << n)
            good = redraws = 0
            for t in range(args.trials):
                rng = trial_rng(args.seed * 1000 + n, t)
                params = CipherParams(variant, n, rounds, seed=int(rng.integers(1 << 63)))
                keys = KeySchedule.random(n, rounds, rng)
                cfg, s, extra = draw_nondegenerate(name, params, keys, rng)
                redraws += extra
                table = build(CipherOracle(params, keys), cfg).table()
                good += bool(s) and np.array_equal(table, table[xs ^ s])
            print(f"{name:<11} {n:>3} {good:>5}/{args.trials:<3} {redraws:>8}")


if __name__ == "__main__":
    main()

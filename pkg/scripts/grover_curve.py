"""Grover success probability per iteration, simulated against closed form.

    python3 scripts/grover_curve.py --n 8 --marked 1
"""

import argparse

import numpy as np

from fbcq.grover import grover_iterations, grover_search_statevector, grover_success_closed_form


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--marked", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    marked = rng.choice(1 << args.n, args.marked, replace=False)
    R = grover_iterations(args.n)
    print(f"n={args.n} marked={args.marked} default R={R}")
    print(f"{'iter':>4} {'simulated':>10} {'closed':>10}")
    for it in range(0, 2 * R + 1):
        out = grover_search_statevector(lambda x: np.isin(x, marked), args.n, rng, iterations=it)
        closed = grover_success_closed_form(args.n, it, args.marked)
        flag = "  <- R" if it == R else ""
        print(f"{it:>4} {out.success_probability:>10.6f} {closed:>10.6f}{flag}")


if __name__ == "__main__":
    main()

"""Survivor statistics of the superposition-query key-recovery attacks.

    python3 scripts/q2_survivors.py --trials 20

For each (attack, r, n) the table shows how often the planted trailing keys
survived, the mean number of wrong survivors and their share of the guess
space, alongside the guessed bits and the nominal Grover exponent.
"""

import argparse

import numpy as np

from fbcq.experiments import ExperimentConfig, run_attack_trial

RUNS = [("q2-fbcf", 6, 4), ("q2-fbcf", 7, 3), ("q2-fbckf", 6, 4), ("q2-fbckf", 7, 3),
        ("q2-fbcfk", 7, 4), ("q2-fbcfk", 7, 6), ("q2-fbcfk", 8, 4)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()

    print(f"{'attack':<9} {'r':>2} {'n':>2} {'bits':>5} {'grover':>7} {'planted':>8} {'wrong':>8} {'share':>8}")
    for target, r, n in RUNS:
        cfg = ExperimentConfig(n=n, r=r, seed=args.seed)
        recs = [run_attack_trial(target, cfg, t) for t in range(args.trials)]
        bits = recs[0]["guessed_bits"]
        planted = sum(rec["planted_contained"]["all"] for rec in recs)
        wrong = np.mean([rec["wrong_survivors"] for rec in recs])
        print(f"{target:<9} {r:>2} {n:>2} {bits:>5} {recs[0]['notes']['grover_exponent']:>7.1f} "
              f"{planted:>4}/{args.trials:<3} {wrong:>8.2f} {wrong / 2 ** bits:>8.4f}")


if __name__ == "__main__":
    main()

"""Distinguisher verdict rates across widths, genuine versus impostor.

    python3 scripts/distinguisher_rates.py --ns 4 6 8 --trials 100

Also reports the mean number of Simon rounds spent per trial, which grows
linearly in n for genuine oracles and stops at the budget for impostors.
"""

import argparse

import numpy as np

from fbcq.distinguishers import STRUCTURES
from fbcq.experiments import ExperimentConfig, run_distinguisher_trial


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--ns", type=int, nargs="+", default=[4, 6, 8])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print(f"{'structure':<11} {'n':>3} {'CIPHER|genuine':>15} {'RANDOM|impostor':>16} {'rounds':>7}")
    for name in STRUCTURES:
        for n in args.ns:
            rates, rounds = {}, []
            for mode in ("genuine", "impostor"):
                cfg = ExperimentConfig(n=n, trials=args.trials, seed=args.seed, mode=mode)
                recs = [run_distinguisher_trial(name, cfg, t) for t in range(args.trials)]
                rates[mode] = np.mean([r["correct"] for r in recs])
                rounds += [r["simon_rounds"] for r in recs if mode == "genuine"]
            print(f"{name:<11} {n:>3} {rates['genuine']:>15.2f} {rates['impostor']:>16.2f} {np.mean(rounds):>7.1f}")


if __name__ == "__main__":
    main()

"""Command-line experiment runner.

    fbcq distinguish --structure fbc-f-4r --n 8 --trials 100 --seed 42
    fbcq attack q1-fbckf-4r --n 8 --trials 100 --seed 7
    fbcq selftest --json

Records go to stdout (or ``--out``) as JSONL; human summaries go to stderr.
Settings may also come from ``--config FILE`` holding ``key = value`` lines
(``#`` starts a comment, keys are the long option names with dashes or
underscores); command-line flags override the file, which overrides the
built-in defaults.

Exit codes: 0 success, 1 failed trials or self-test, 2 usage, 3 resource guard.
"""

from __future__ import annotations

import argparse
import functools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional

from .attacks.common import ResourceGuardError
from .distinguishers import STRUCTURES
from .experiments import ATTACKS, ExperimentConfig, precheck, run_attack_trial, run_distinguisher_trial
from .selftest import run_selftest

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=8, help="branch width in bits")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="master seed; trial t uses SeedSequence([seed, t])")
    p.add_argument("--mode", choices=["genuine", "impostor"], default="genuine")
    p.add_argument("--max-rounds", type=int, default=None, help="Simon sampling budget (default 4n)")
    p.add_argument("--functions", choices=["random", "permutation", "zero"], default="random",
                   help="round-function family")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--out", default=None, help="JSONL output path (default stdout)")
    p.add_argument("--config", default=None, help="key = value settings file")
    p.add_argument("--timing", action="store_true", help="record wall_ms (breaks byte-identical reruns)")


def build_parser() -> tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="fbcq", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distinguish", help="distinguisher trials")
    d.add_argument("--structure", required=False, default=None, help=", ".join(STRUCTURES))
    _common(d)

    a = sub.add_parser("attack", help="key-recovery trials")
    a.add_argument("target", nargs="?", default=None, help=", ".join(ATTACKS))
    a.add_argument("--r", type=int, default=None, help="rounds (q2 attacks)")
    a.add_argument("--m", type=int, default=None, help="outer key bits (gms-fx, default n)")
    a.add_argument("--override-guard", action="store_true",
                   help="allow more than 20 guessed key bits (or QATTACK_GUARD_OVERRIDE=1)")
    a.add_argument("--grover-demo", action="store_true", help="gms-fx: attach a statevector Grover run")
    _common(a)

    s = sub.add_parser("selftest", help="reduced invariant suites")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true", help="print the summary as one JSON object")
    s.add_argument("--inject-fault", action="store_true", help="add a deliberately failing check")
    return parser, {"distinguish": d, "attack": a, "selftest": s}


def read_config(path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _apply_config(sub: argparse.ArgumentParser, values: Dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            low = value.lower()
            if low not in TRUE_WORDS | FALSE_WORDS:
                raise ValueError(f"config key {key!r} expects a boolean, got {value!r}")
            defaults[key] = low in TRUE_WORDS
        else:
            if action.choices is not None and value not in action.choices:
                raise ValueError(f"config key {key!r}: {value!r} not in {sorted(action.choices)}")
            defaults[key] = value
    sub.set_defaults(**defaults)


def parse(argv: List[str]) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    path = getattr(args, "config", None)
    if path:
        try:
            _apply_config(subs[args.command], read_config(path))
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
        args = parser.parse_args(argv)
    if args.command == "distinguish" and args.structure not in STRUCTURES:
        subs["distinguish"].error(f"--structure must be one of {', '.join(STRUCTURES)}")
    if args.command == "attack" and args.target not in ATTACKS:
        subs["attack"].error(f"target must be one of {', '.join(ATTACKS)}")
    if args.command != "selftest" and args.trials < 1:
        parser.error("--trials must be at least 1")
    return args


def _experiment(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        n=args.n, r=getattr(args, "r", None), m=getattr(args, "m", None), trials=args.trials, seed=args.seed,
        mode=args.mode, max_rounds=args.max_rounds, functions=args.functions,
        override_guard=getattr(args, "override_guard", False), timing=args.timing,
        extra={"grover_demo": getattr(args, "grover_demo", False)})


def run_trials(fn: Callable[[int], dict], trials: int, workers: Optional[int]) -> List[dict]:
    """Records in trial order whatever the completion order."""
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ProcessPoolExecutor(max_workers=min(workers, trials)) as pool:
        return list(pool.map(fn, range(trials)))


def _emit(records: List[dict], out: Optional[str]) -> None:
    text = "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def cmd_distinguish(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    fn = functools.partial(run_distinguisher_trial, args.structure, cfg)
    records = run_trials(fn, cfg.trials, args.workers)
    _emit(records, args.out)
    verdicts = [r["verdict"] for r in records]
    rate = sum(r["correct"] for r in records) / len(records)
    print(f"distinguish {args.structure} n={cfg.n} mode={cfg.mode}: CIPHER {verdicts.count('CIPHER')}, "
          f"RANDOM {verdicts.count('RANDOM')}, correct rate {rate:.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    cfg = _experiment(args)
    try:
        precheck(args.target, cfg)
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.target.startswith("q1") and cfg.mode == "impostor":
        print("usage: impostor mode applies to q2 attacks only", file=sys.stderr)
        return EXIT_USAGE
    fn = functools.partial(run_attack_trial, args.target, cfg)
    records = run_trials(fn, cfg.trials, args.workers)
    _emit(records, args.out)
    ok = sum(r["success"] for r in records)
    print(f"attack {args.target} n={cfg.n} r={records[0]['r']} mode={cfg.mode}: {ok}/{len(records)} successful",
          file=sys.stderr)
    return EXIT_OK if ok == len(records) else EXIT_FAIL


def cmd_selftest(args: argparse.Namespace) -> int:
    summary = run_selftest(args.seed, args.inject_fault)
    if not args.json:
        for name, res in summary["checks"].items():
            status = "ok" if res["ok"] else "FAIL"
            extra = f" ({res['error']})" if res["error"] else ""
            print(f"{status:4} {name} {res['seconds']:.2f}s{extra}", file=sys.stderr)
    if args.json:
        print(json.dumps(summary, separators=(",", ":")))
    else:
        print(f"selftest: {summary['passed']} passed, {summary['failed']} failed"
              + (f" ({', '.join(summary['failures'])})" if summary["failures"] else ""))
    return EXIT_OK if not summary["failed"] else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    return {"distinguish": cmd_distinguish, "attack": cmd_attack, "selftest": cmd_selftest}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

"""Reduced-size invariant checks for every module, runnable from the CLI."""

from __future__ import annotations

import math
import time
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import gf2
from .cipher import CipherParams, KeySchedule, RoundFunctions, State4, Variant, decrypt, encrypt, fbc_round_with
from .distinguishers import STRUCTURES, DistinguisherConfig
from .experiments import ExperimentConfig, run_attack_trial, run_distinguisher_trial
from .grover import grover_iterations, grover_search_statevector, grover_success_closed_form
from .oracle import CipherOracle
from .simon import coset_distribution, simon_sample, statevector_distribution
from .whitebox import EXPECTED_PERIOD


def check_round_trip(rng) -> bool:
    for variant in Variant:
        for n in (2, 5, 8):
            for r in (1, 4, 8):
                params = CipherParams(variant, n, r, seed=int(rng.integers(1 << 32)))
                keys = KeySchedule.random(n, r, rng)
                words = 4 if variant.four_branch else 2
                pt = tuple(rng.integers(0, 1 << n, size=50) for _ in range(words))
                back = decrypt(params, keys, encrypt(params, keys, pt))
                if not all(np.array_equal(a, b) for a, b in zip(back, pt)):
                    return False
    return True


def check_zero_fixture(rng) -> bool:
    z = RoundFunctions.zero(4)
    return (fbc_round_with(Variant.FBC_F, State4(1, 2, 3, 4), 1, 0, 0, z) == (2, 2, 6, 3)
            and fbc_round_with(Variant.FBC_FK, State4(1, 2, 3, 4), 1, 5, 9, z) == (7, 11, 3, 10))


def check_gf2(rng) -> bool:
    for _ in range(50):
        n = int(rng.integers(2, 10))
        rows = [int(v) for v in rng.integers(0, 1 << n, size=int(rng.integers(0, 2 * n)))]
        basis = gf2.nullspace_basis(rows, n)
        if gf2.rank(rows, n) + len(basis) != n:
            return False
        if any(gf2.dot(row, b) for row in rows for b in basis):
            return False
    return True


def check_simon_orthogonal(rng) -> bool:
    n, s = 6, int(rng.integers(1, 64))
    perm = rng.permutation(64)
    table = np.minimum(perm[np.arange(64)], perm[np.arange(64) ^ s])
    return all(gf2.dot(simon_sample(table, n, rng), s) == 0 for _ in range(500))


def check_coset_statevector(rng) -> bool:
    for n in (2, 3, 4):
        table = rng.integers(0, 1 << n, size=1 << n)
        if np.abs(coset_distribution(table, n) - statevector_distribution(table, n)).sum() / 2 > 1e-10:
            return False
    return True


def check_grover(rng) -> bool:
    for n in range(2, 9):
        R = grover_iterations(n)
        out = grover_search_statevector(lambda x: x == 1, n, rng)
        if abs(out.success_probability - grover_success_closed_form(n, R)) > 1e-10:
            return False
    return math.isclose(grover_search_statevector(lambda x: x == 2, 2, rng, iterations=1).success_probability,
                        1.0, abs_tol=1e-12)


def check_closed_form_periods(rng) -> bool:
    n = 6
    for name, (variant, rounds, build) in STRUCTURES.items():
        for _ in range(5):
            params = CipherParams(variant, n, rounds, seed=int(rng.integers(1 << 32)))
            keys = KeySchedule.random(n, rounds, rng)
            cfg = DistinguisherConfig.random(n, rng)
            s = EXPECTED_PERIOD[name](params.family, keys, cfg)
            table = build(CipherOracle(params, keys), cfg).table()
            if not np.array_equal(table, table[np.arange(1 << n) ^ s]):
                return False
    return True


def check_distinguishers(rng) -> bool:
    for name in STRUCTURES:
        for mode in ("genuine", "impostor"):
            cfg = ExperimentConfig(n=6, trials=3, seed=int(rng.integers(1 << 32)), mode=mode)
            if sum(run_distinguisher_trial(name, cfg, t)["correct"] for t in range(3)) < 2:
                return False
    return True


def check_attacks(rng) -> bool:
    runs = [("q1-feistel-kf-3r", 6, None), ("q1-fbckf-4r", 6, None), ("q1-fbcfk-5r", 6, None),
            ("q2-fbcf", 3, 6), ("q2-fbckf", 3, 6), ("q2-fbcfk", 4, 7), ("gms-fx", 6, None)]
    for target, n, r in runs:
        cfg = ExperimentConfig(n=n, r=r, seed=int(rng.integers(1 << 32)))
        if not all(run_attack_trial(target, cfg, t)["success"] for t in range(2)):
            return False
    return True


def check_fault(rng) -> bool:
    """Deliberately failing check, enabled by ``--inject-fault``."""
    return False


CHECKS: List[Tuple[str, Callable]] = [
    ("cipher.round_trip", check_round_trip),
    ("cipher.zero_fixture", check_zero_fixture),
    ("gf2.rank_nullity", check_gf2),
    ("simon.orthogonality", check_simon_orthogonal),
    ("simon.coset_vs_statevector", check_coset_statevector),
    ("grover.closed_form", check_grover),
    ("distinguishers.periods", check_closed_form_periods),
    ("distinguishers.verdicts", check_distinguishers),
    ("attacks.planted_recovery", check_attacks),
]


def run_selftest(seed: int = 0, inject_fault: bool = False) -> Dict[str, object]:
    checks = CHECKS + ([("fault.injected", check_fault)] if inject_fault else [])
    results: Dict[str, dict] = {}
    for i, (name, fn) in enumerate(checks):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        start = time.perf_counter()
        try:
            ok = bool(fn(rng))
            err = None
        except Exception as exc:  # a crashing check is a failing check
            ok, err = False, f"{type(exc).__name__}: {exc}"
        results[name] = {"ok": ok, "seconds": round(time.perf_counter() - start, 3), "error": err}
    failures = [k for k, v in results.items() if not v["ok"]]
    return {"schema_version": 1, "kind": "selftest", "passed": len(results) - len(failures),
            "failed": len(failures), "failures": failures, "checks": results}

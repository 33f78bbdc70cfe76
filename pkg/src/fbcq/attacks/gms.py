"""Grover-meets-Simon: outer key search decided by inner periodicity.

The FX fixture wraps a seeded keyed permutation family E with whitening
keys, Enc(x) = E_{k0}(x ^ k1) ^ k2. For the right outer guess k = k0 the
function f(k, x) = Enc(x) ^ E_k(x) has period k1; for other guesses it is a
XOR of two unrelated permutations and almost never periodic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from ..grover import GroverOutcome, grover_iterations, grover_search_statevector
from ..oracle import QueryCounter
from ..simon import SimonConfig, simon_batch
from .common import AttackReport, check_guard

GMS_MAX_KEY_BITS = 20
GMS_MAX_WIDTH = 12
STATEVECTOR_DEMO_MAX = 10


@dataclass
class GmsProblem:
    """``f(k, x)`` must accept broadcasting integer arrays for k and x."""

    key_space_bits: int
    period_space_bits: int
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __post_init__(self):
        if not 1 <= self.key_space_bits <= GMS_MAX_KEY_BITS:
            raise ValueError(f"key space of {self.key_space_bits} bits outside [1, {GMS_MAX_KEY_BITS}]")
        if not 2 <= self.period_space_bits <= GMS_MAX_WIDTH:
            raise ValueError(f"period space of {self.period_space_bits} bits outside [2, {GMS_MAX_WIDTH}]")


@dataclass
class GmsResult:
    survivors: Dict[int, int]  # key guess -> confirmed period
    evaluations: int
    simon_rounds: int
    grover_demo: Optional[GroverOutcome] = None

    @property
    def failed(self) -> bool:
        return not self.survivors


def grover_meets_simon(problem: GmsProblem, simon_cfg: SimonConfig | None, rng: np.random.Generator,
                       statevector_demo: bool = False, chunk_cells: int = 1 << 20) -> GmsResult:
    """Run Simon on every restriction f(k, .) and keep the periodic ones.

    The outer loop is exhaustive (the classical stand-in for Grover). With
    ``statevector_demo`` and m <= 10, a real-amplitude Grover run over the
    key space, marking the keys found periodic, is attached to the result.
    """
    cfg = simon_cfg or SimonConfig()
    m, n = problem.key_space_bits, problem.period_space_bits
    xs = np.arange(1 << n, dtype=np.int64)
    rows = max(1, chunk_cells >> n)
    survivors: Dict[int, int] = {}
    rounds = 0
    for lo in range(0, 1 << m, rows):
        keys = np.arange(lo, min(1 << m, lo + rows), dtype=np.int64)
        tables = np.asarray(problem.f(keys[:, None], xs[None, :]), dtype=np.int64)
        tables = np.broadcast_to(tables, (len(keys), 1 << n))
        res = simon_batch(tables, n, cfg, rng)
        rounds += int(res.rounds_used.sum())
        for i in np.flatnonzero(res.found):
            survivors[int(keys[i])] = int(res.period[i])
    demo = None
    if statevector_demo:
        if m > STATEVECTOR_DEMO_MAX:
            raise ValueError(f"statevector demo limited to m <= {STATEVECTOR_DEMO_MAX}")
        marked = np.zeros(1 << m, dtype=bool)
        marked[list(survivors)] = True
        demo = grover_search_statevector(lambda k: marked[k], m, rng)
    return GmsResult(survivors, (1 << m) << n, rounds, demo)


# -- FX fixture ------------------------------------------------------------------


def keyed_permutations(seed: int, m: int, n: int) -> np.ndarray:
    """Table ``E[k, x]``: one seeded permutation of {0,1}^n per k in {0,1}^m."""
    gen = np.random.default_rng(np.random.SeedSequence([seed, m, n, 0xF7]))
    return np.argsort(gen.random((1 << m, 1 << n)), axis=1).astype(np.int64)


@dataclass
class FxFixture:
    m: int
    n: int
    seed: int
    k0: int
    k1: int
    k2: int
    counter: QueryCounter = field(default_factory=QueryCounter)

    def __post_init__(self):
        check_guard(self.m, "FX outer search", limit=GMS_MAX_KEY_BITS)
        self.E = keyed_permutations(self.seed, self.m, self.n)

    @classmethod
    def random(cls, m: int, n: int, rng: np.random.Generator) -> "FxFixture":
        seed = int(rng.integers(0, 1 << 63))
        k0 = int(rng.integers(0, 1 << m))
        k1 = int(rng.integers(1, 1 << n))  # a zero whitening key leaves nothing to find
        k2 = int(rng.integers(0, 1 << n))
        return cls(m, n, seed, k0, k1, k2)

    def inner(self, k, x):
        return self.E[k, x]

    def encrypt(self, x):
        """Oracle access (superposed): each element is one simulated encryption."""
        self.counter.simulated_encryptions += int(np.size(x))
        return self.E[self.k0, np.asarray(x) ^ self.k1] ^ self.k2

    def problem(self) -> GmsProblem:
        enc = self.encrypt(np.arange(1 << self.n, dtype=np.int64))

        def f(k, x):
            return enc[x] ^ self.E[k, x]
        return GmsProblem(self.m, self.n, f)


def attack_fx(fx: FxFixture, simon_cfg: SimonConfig | None, rng: np.random.Generator,
              statevector_demo: bool = False) -> AttackReport:
    """Recover (k0, k1, k2) from Enc alone: survivors give (k0, k1), then
    k2 = Enc(0) ^ E_{k0}(k1)."""
    report = AttackReport("gms-fx", "fx", fx.n, 0, guessed_bits=fx.m)
    res = grover_meets_simon(fx.problem(), simon_cfg, rng, statevector_demo)
    fx.counter.superposition_query_units += res.simon_rounds
    enc0 = int(fx.encrypt(np.array([0]))[0])
    for k, s in sorted(res.survivors.items()):
        report.survivors.append({"k0": k, "k1": s, "k2": enc0 ^ int(fx.inner(k, s))})
    report.set_recovered(report.survivors, ["k0", "k1", "k2"])
    report.search_evaluations = res.evaluations
    report.grover_nominal_cost = grover_iterations(fx.m)
    report.chain_count = len(report.survivors)
    report.status = "survivors" if report.survivors else "empty"
    report.counters = fx.counter.to_dict()
    if res.grover_demo is not None:
        report.notes["grover_demo"] = {
            "found": res.grover_demo.found,
            "iterations": res.grover_demo.iterations,
            "success_probability": res.grover_demo.success_probability,
        }
    return report

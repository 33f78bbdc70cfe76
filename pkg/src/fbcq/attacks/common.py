"""Reports, resource guards and candidate-chain search shared by every attack."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from ..grover import grover_iterations, grover_search_exhaustive
from ..oracle import QueryCounter

GUARD_BITS = 20
CHAIN_CAP = 1 << 16
GUARD_ENV = "QATTACK_GUARD_OVERRIDE"


class ResourceGuardError(RuntimeError):
    """A requested run would exceed the desk-scale search limits."""


class ChainOverflow(RuntimeError):
    """Candidate chains multiplied past the configured cap."""


def guard_overridden(flag: bool = False) -> bool:
    return flag or os.environ.get(GUARD_ENV) == "1"


def check_guard(bits: int, what: str, override: bool = False, limit: int = GUARD_BITS) -> None:
    if bits > limit and not guard_overridden(override):
        raise ResourceGuardError(
            f"{what} needs {bits} guessed key bits, above the limit of {limit}; "
            f"pass --override-guard or set {GUARD_ENV}=1")


@dataclass
class AttackReport:
    attack_id: str
    structure: str
    n: int
    r: int
    recovered: Dict[str, List[int]] = field(default_factory=dict)
    planted_contained: Dict[str, bool] = field(default_factory=dict)
    counters: Dict[str, int] = field(default_factory=dict)
    search_evaluations: int = 0
    grover_nominal_cost: int = 0
    trace: List[dict] = field(default_factory=list)
    chain_count: int = 0
    status: str = "pending"
    guessed_bits: Optional[int] = None
    survivors: List[Dict[str, int]] = field(default_factory=list)
    notes: Dict[str, object] = field(default_factory=dict)

    def note(self, step: str, values) -> None:
        vals = sorted({int(v) for v in np.ravel(values)}) if np.size(values) else []
        self.trace.append({"step": step, "values": vals})

    def set_recovered(self, chains: List[Dict[str, int]], labels: List[str]) -> None:
        self.recovered = {lab: sorted({int(ch[lab]) for ch in chains}) for lab in labels}

    def grade(self, planted: Dict[str, int]) -> bool:
        """Fill ``planted_contained``; returns whether the full planted
        assignment appears as one chain/survivor (not just label by label)."""
        self.planted_contained = {lab: int(v) in set(self.recovered.get(lab, [])) for lab, v in planted.items()}
        whole = any(all(int(s.get(lab, -1)) == int(v) for lab, v in planted.items()) for s in self.survivors)
        self.planted_contained["all"] = whole
        return whole


class ChainSearch:
    """Exhaustive solves over {0,1}^n with forking candidate chains.

    Every solve is one (classically simulated) Grover search: it costs 2^n
    predicate evaluations here and ceil(pi/4 * 2^(n/2)) nominal Grover
    iterations.
    """

    def __init__(self, n: int, report: AttackReport, cap: int = CHAIN_CAP):
        self.n = n
        self.report = report
        self.cap = cap
        self.domain = np.arange(1 << n, dtype=np.int64)

    def solve(self, predicate: Callable[[np.ndarray], np.ndarray]) -> List[int]:
        res = grover_search_exhaustive(predicate, self.n)
        self.report.search_evaluations += res.evaluations
        self.report.grover_nominal_cost += grover_iterations(self.n)
        return res.solutions

    def fork(self, chains: List[dict], label: str,
             predicate_for: Callable[[dict], Callable[[np.ndarray], np.ndarray]]) -> List[dict]:
        out = []
        for ch in chains:
            for v in self.solve(predicate_for(ch)):
                out.append({**ch, label: v})
                if len(out) > self.cap:
                    raise ChainOverflow(f"more than {self.cap} chains after solving {label}")
        self.report.note(label, [ch[label] for ch in out])
        return out


def counters_of(counter: QueryCounter) -> Dict[str, int]:
    return counter.to_dict()


def nominal_grover_bits(bits: int) -> float:
    """log2 of the Grover iteration count over a 2^bits space (about bits/2)."""
    return math.log2(math.ceil(math.pi / 4 * math.sqrt(2.0**bits)))

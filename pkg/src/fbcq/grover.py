"""Grover search: exhaustive classical stand-in and a real-amplitude statevector."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

STATEVECTOR_MAX_WIDTH = 12


@dataclass(frozen=True)
class GroverOutcome:
    found: Optional[int]
    iterations: int
    success_probability: float
    evaluations: int
    marked: int


@dataclass(frozen=True)
class SearchResult:
    solutions: List[int]
    evaluations: int


def grover_iterations(n: int) -> int:
    """R = ceil(pi/4 * sqrt(2^n))."""
    if n < 1:
        raise ValueError("n must be positive")
    return math.ceil(math.pi / 4 * math.sqrt(2.0**n))


def grover_success_closed_form(n: int, iterations: int, marked: int = 1) -> float:
    theta = math.asin(math.sqrt(marked / 2.0**n))
    return math.sin((2 * iterations + 1) * theta) ** 2


def _mark(predicate: Callable, n: int) -> np.ndarray:
    dom = np.arange(1 << n, dtype=np.int64)
    try:
        marked = np.asarray(predicate(dom))
    except (TypeError, ValueError):
        marked = None
    if marked is None or marked.shape != dom.shape:
        marked = np.fromiter((bool(predicate(int(x))) for x in dom), dtype=bool, count=len(dom))
    return marked.astype(bool)


def grover_search_exhaustive(predicate: Callable, n: int) -> SearchResult:
    """Every x in {0,1}^n with predicate(x) true; always 2^n evaluations.

    ``predicate`` may be vectorized (array in, bool array out) or scalar.
    """
    marked = _mark(predicate, n)
    return SearchResult([int(x) for x in np.flatnonzero(marked)], 1 << n)


def grover_search_statevector(predicate: Callable, n: int, rng: np.random.Generator,
                              iterations: int | None = None) -> GroverOutcome:
    """R rounds of phase oracle + diffusion on a 2^n real amplitude vector."""
    if n > STATEVECTOR_MAX_WIDTH:
        raise ValueError(f"statevector Grover limited to n <= {STATEVECTOR_MAX_WIDTH}")
    marked = _mark(predicate, n)
    rounds = grover_iterations(n) if iterations is None else iterations
    size = 1 << n
    amp = np.full(size, 1.0 / math.sqrt(size))
    for _ in range(rounds):
        amp[marked] = -amp[marked]
        amp = 2.0 * amp.mean() - amp
    probs = amp**2
    success = float(min(1.0, probs[marked].sum()))
    pick = int(rng.choice(size, p=probs / probs.sum()))
    return GroverOutcome(pick if marked[pick] else None, rounds, success, size, int(marked.sum()))

"""Exact desk-scale simulation of Simon's period-finding algorithm.

The default sampler uses the coset method: measuring the output register
first collapses the input register onto a preimage set S = f^{-1}(f(x0)), and
the final Hadamard layer then yields y with probability proportional to
|sum_{x in S} (-1)^{y.x}|^2. That is the same distribution as the full
2n-qubit circuit (see :func:`statevector_distribution`), at a cost of one
Walsh-Hadamard transform of length 2^n.

:func:`simon_batch` runs many independent Simon instances at once, one per
row of a stack of truth tables; key-guessing attacks use it to test every
guess in a single vectorized pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Set, Union

import numpy as np

from . import gf2
from .oracle import PeriodicFunctionHandle

FunctionLike = Union[PeriodicFunctionHandle, np.ndarray]


@dataclass(frozen=True)
class SimonConfig:
    max_rounds: Optional[int] = None  # None means 4n
    verify_samples: int = 16
    full_confirm: bool = False

    def rounds_for(self, n: int) -> int:
        rounds = 4 * n if self.max_rounds is None else self.max_rounds
        if rounds < n - 1:
            raise ValueError(f"sampling budget {rounds} below n-1 = {n - 1}")
        return rounds


@dataclass(frozen=True)
class SimonResult:
    period: Optional[int]
    rounds_used: int
    rank: int
    multiple: bool = False
    degenerate: bool = False


@dataclass
class SimonBatchResult:
    """Per-row outcomes; ``period[i] == -1`` means no confirmed period."""

    period: np.ndarray
    rounds_used: np.ndarray
    rank: np.ndarray
    multiple: np.ndarray
    degenerate: np.ndarray

    def row(self, i: int) -> SimonResult:
        p = int(self.period[i])
        return SimonResult(None if p < 0 else p, int(self.rounds_used[i]), int(self.rank[i]),
                           bool(self.multiple[i]), bool(self.degenerate[i]))

    @property
    def found(self) -> np.ndarray:
        return self.period >= 0


def walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized transform along the last axis: out[y] = sum_x (-1)^{x.y} a[x]."""
    a = np.array(a, copy=True)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        a = a.reshape(*lead, size // (2 * h), 2, h)
        lo, hi = a[..., 0, :], a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return a.reshape(*lead, size)


def _as_table(f: FunctionLike, n: int) -> np.ndarray:
    if isinstance(f, PeriodicFunctionHandle):
        return f.table()
    table = np.asarray(f, dtype=np.int64)
    if table.shape[-1] != 1 << n:
        raise ValueError(f"truth table length {table.shape[-1]} != 2^{n}")
    return table


def _parity(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a) & 1


# -- sampling ----------------------------------------------------------------


def _coset_samples(tables: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One measurement per row of ``tables``."""
    rows, size = tables.shape
    x0 = rng.integers(0, size, size=rows)
    marked = (tables == tables[np.arange(rows), x0][:, None]).astype(np.int64)
    weights = walsh_hadamard(marked) ** 2
    cdf = np.cumsum(weights, axis=1)
    u = rng.integers(0, cdf[:, -1])
    return (cdf <= u[:, None]).sum(axis=1)


def simon_sample(f: FunctionLike, n: int, rng: np.random.Generator) -> int:
    """One run of the circuit: returns the measured y."""
    table = _as_table(f, n)
    return int(_coset_samples(table[None, :], rng)[0])


def coset_distribution(f: FunctionLike, n: int) -> np.ndarray:
    """Exact distribution of one Simon measurement, computed class by class."""
    table = _as_table(f, n)
    size = 1 << n
    probs = np.zeros(size)
    for value in np.unique(table):
        probs += walsh_hadamard((table == value).astype(np.float64)) ** 2
    return probs / size**2


def statevector_distribution(f: FunctionLike, n: int) -> np.ndarray:
    """Distribution of y from a full 2n-qubit statevector run of Simon's circuit."""
    table = _as_table(f, n)
    size = 1 << n
    psi = np.zeros((size, size))
    psi[0, 0] = 1.0
    psi = walsh_hadamard(psi.T).T / np.sqrt(size)
    cols = np.arange(size)[None, :] ^ table[:, None]
    psi = np.take_along_axis(psi, cols, axis=1)
    psi = walsh_hadamard(psi.T).T / np.sqrt(size)
    return (psi**2).sum(axis=1)


# -- period recovery -----------------------------------------------------------


def _insert(basis: np.ndarray, rank: np.ndarray, rows: np.ndarray, y: np.ndarray, n: int) -> None:
    """Add sample y[i] to the xor-basis of row rows[i] (in place)."""
    v = y.copy()
    sub = basis[rows]
    for bit in range(n - 1, -1, -1):
        has = (v >> bit) & 1 == 1
        slot = sub[:, bit]
        reduce = has & (slot != 0)
        v[reduce] ^= slot[reduce]
        place = has & (slot == 0)
        sub[place, bit] = v[place]
        v[place] = 0
        rank[rows[place]] += 1
    basis[rows] = sub


def _confirm(tables: np.ndarray, rows: np.ndarray, s: np.ndarray, cfg: SimonConfig,
             rng: np.random.Generator) -> np.ndarray:
    size = tables.shape[1]
    t = tables[rows]
    xs = rng.integers(0, size, size=(len(rows), cfg.verify_samples))
    r = np.arange(len(rows))[:, None]
    ok = np.all(t[r, xs] == t[r, xs ^ s[:, None]], axis=1)
    if cfg.full_confirm:
        dom = np.arange(size)[None, :]
        ok &= np.all(t == t[r, dom ^ s[:, None]], axis=1)
    return ok


def _unique_null_vector(basis: np.ndarray, n: int) -> np.ndarray:
    """For rows of rank n-1, the single nonzero s orthogonal to every basis vector."""
    cand = np.arange(1, 1 << n, dtype=np.int64)
    out = np.empty(len(basis), dtype=np.int64)
    chunk = max(1, (1 << 22) // (n * len(cand)))
    for lo in range(0, len(basis), chunk):
        b = basis[lo:lo + chunk]
        orth = ~np.any(_parity(b[:, :, None] & cand[None, None, :]).astype(bool), axis=1)
        out[lo:lo + chunk] = cand[np.argmax(orth, axis=1)]
    return out


def simon_batch(tables: np.ndarray, n: int, cfg: SimonConfig, rng: np.random.Generator) -> SimonBatchResult:
    """Independent Simon runs on each row of ``tables`` (shape (rows, 2^n)).

    Per row: sample until the measurements reach rank n-1, take the unique
    nonzero vector orthogonal to them and confirm it with random checks
    f(x) = f(x ^ s). A failed confirmation keeps the row sampling; rank n
    ends it with no period. If the budget runs out with rank between 1 and
    n-2 (several exact periods), every nonzero null-space vector is
    confirmed, the smallest confirmed one is returned and the row is flagged
    ``multiple``. Rank 0 means only y = 0 was ever seen: ``degenerate``.
    """
    tables = np.asarray(tables, dtype=np.int64)
    rows = tables.shape[0]
    budget = cfg.rounds_for(n)
    basis = np.zeros((rows, n), dtype=np.int64)
    rank = np.zeros(rows, dtype=np.int64)
    period = np.full(rows, -1, dtype=np.int64)
    rounds_used = np.zeros(rows, dtype=np.int64)
    multiple = np.zeros(rows, dtype=bool)
    active = np.ones(rows, dtype=bool)

    for _ in range(budget):
        act = np.flatnonzero(active)
        if not len(act):
            break
        y = _coset_samples(tables[act], rng)
        rounds_used[act] += 1
        before = rank[act].copy()
        _insert(basis, rank, act, y, n)
        full = act[rank[act] == n]
        active[full] = False
        fresh = act[(rank[act] == n - 1) & (before < n - 1)]
        if len(fresh):
            s = _unique_null_vector(basis[fresh], n)
            ok = _confirm(tables, fresh, s, cfg, rng)
            period[fresh[ok]] = s[ok]
            active[fresh[ok]] = False

    degenerate = active & (rank == 0)
    for i in np.flatnonzero(active & (rank >= 1) & (rank <= n - 2)):
        vecs = [int(v) for v in basis[i] if v]
        confirmed = []
        for s in sorted(gf2.span(gf2.nullspace_basis(vecs, n))[1:]):
            if _confirm(tables, np.array([i]), np.array([s]), cfg, rng)[0]:
                confirmed.append(s)
        if confirmed:
            period[i] = confirmed[0]
            multiple[i] = len(confirmed) > 1
    return SimonBatchResult(period, rounds_used, rank, multiple, degenerate)


def simon_run(f: FunctionLike, n: int, cfg: SimonConfig | None = None,
              rng: np.random.Generator | None = None) -> SimonResult:
    cfg = cfg or SimonConfig()
    rng = rng if rng is not None else np.random.default_rng()
    table = _as_table(f, n)
    result = simon_batch(table[None, :], n, cfg, rng).row(0)
    if isinstance(f, PeriodicFunctionHandle):
        f.note_sampling_rounds(result.rounds_used)
    return result


def simon_find_period(f: FunctionLike, n: int, cfg: SimonConfig | None = None,
                      rng: np.random.Generator | None = None) -> Optional[int]:
    return simon_run(f, n, cfg, rng).period


def brute_force_period(f: FunctionLike, n: int) -> Set[int]:
    """Every nonzero s with f(x) = f(x ^ s) on the whole domain."""
    table = _as_table(f, n)
    size = 1 << n
    dom = np.arange(size)
    found: List[int] = []
    chunk = max(1, (1 << 22) // size)
    for lo in range(1, size, chunk):
        s = np.arange(lo, min(size, lo + chunk))
        ok = np.all(table[dom[None, :] ^ s[:, None]] == table[None, :], axis=1)
        found.extend(int(v) for v in s[ok])
    return set(found)

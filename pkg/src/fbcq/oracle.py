"""Encryption oracles with Q1/Q2 mode enforcement and query accounting."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .cipher import CipherParams, FeistelState, KeySchedule, State4, decrypt, encrypt


class OracleMode(str, enum.Enum):
    Q1_CLASSICAL = "Q1_CLASSICAL"
    Q2_SUPERPOSITION = "Q2_SUPERPOSITION"


class ModeViolation(RuntimeError):
    """A superposition query was attempted against a classical-only oracle."""


@dataclass
class QueryCounter:
    classical_queries: int = 0
    superposition_query_units: int = 0
    simulated_encryptions: int = 0
    offline_evaluations: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def snapshot(self) -> "QueryCounter":
        return QueryCounter(**asdict(self))


class PeriodicFunctionHandle:
    """An evaluable f: {0,1}^n -> {0,1}^n.

    ``evaluator`` maps an integer array of inputs to an integer array of
    outputs. The full truth table is computed at most once per handle; the
    coset simulation of Simon's algorithm reads it from there.
    """

    def __init__(self, evaluator: Callable[[np.ndarray], np.ndarray], n: int, tag: str = "",
                 counter: Optional[QueryCounter] = None):
        self.evaluator = evaluator
        self.n = n
        self.tag = tag
        self.counter = counter
        self._table: Optional[np.ndarray] = None

    @classmethod
    def from_table(cls, table, n: int, tag: str = "table") -> "PeriodicFunctionHandle":
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (1 << n,):
            raise ValueError(f"table of shape {table.shape} is not a function on {n} bits")
        handle = cls(lambda x: table[x], n, tag)
        handle._table = table
        return handle

    @classmethod
    def from_callable(cls, fn: Callable[[int], int], n: int, tag: str = "callable") -> "PeriodicFunctionHandle":
        return cls(np.vectorize(fn, otypes=[np.int64]), n, tag)

    def __call__(self, x):
        if self._table is not None:
            out = self._table[x]
        else:
            out = self.evaluator(np.asarray(x, dtype=np.int64))
        return int(out) if np.ndim(out) == 0 else out

    def table(self) -> np.ndarray:
        if self._table is None:
            self._table = np.asarray(self.evaluator(np.arange(1 << self.n, dtype=np.int64)), dtype=np.int64)
        return self._table

    def note_sampling_rounds(self, rounds: int) -> None:
        if self.counter is not None:
            self.counter.superposition_query_units += rounds


class SuperposedAccess:
    """Whole-domain access to an oracle, granted only in the Q2 model.

    Every encryption made through it is tallied as a simulated encryption,
    never as a classical query.
    """

    def __init__(self, oracle: "Oracle"):
        self._oracle = oracle

    def encrypt(self, states):
        out = self._oracle._encrypt_batch(states)
        count = int(np.size(states[0])) if np.ndim(states[0]) else 1
        self._oracle.counter.simulated_encryptions += count
        return out


class Oracle:
    """Common query interface for genuine ciphers and impostors."""

    def __init__(self, params: CipherParams, mode: OracleMode | str = OracleMode.Q2_SUPERPOSITION):
        self.params = params
        self.mode = OracleMode(mode)
        self.counter = QueryCounter()
        self.encryptions_performed = 0

    @property
    def family(self):
        """The public round-function family the attacker may evaluate."""
        return self.params.family

    @property
    def n(self) -> int:
        return self.params.n

    def _encrypt_batch(self, states):
        raise NotImplementedError

    def query(self, plaintext):
        self.counter.classical_queries += 1
        out = self._encrypt_batch(tuple(np.asarray([int(w)], dtype=np.int64) for w in plaintext))
        return type(out)(*(int(w[0]) for w in out))

    def query_batch(self, plaintexts):
        """Classical queries on many plaintexts (each counted)."""
        self.counter.classical_queries += int(np.size(plaintexts[0]))
        return self._encrypt_batch(plaintexts)

    def superposed(self) -> SuperposedAccess:
        if self.mode is not OracleMode.Q2_SUPERPOSITION:
            raise ModeViolation("superposition access requested from a Q1 (classical) oracle")
        return SuperposedAccess(self)

    def query_superposed(self, f_builder, tag: str = "") -> PeriodicFunctionHandle:
        """Build a handle for f from superposition access.

        ``f_builder(access)`` returns a vectorized evaluator of f that encrypts
        through ``access``.
        """
        evaluator = f_builder(self.superposed())
        return PeriodicFunctionHandle(evaluator, self.n, tag, self.counter)


class CipherOracle(Oracle):
    """A reduced-round cipher instance under a hidden key schedule."""

    def __init__(self, params: CipherParams, keys: KeySchedule,
                 mode: OracleMode | str = OracleMode.Q2_SUPERPOSITION):
        super().__init__(params, mode)
        self._keys = keys

    def _encrypt_batch(self, states):
        states = tuple(np.asarray(w, dtype=np.int64) for w in states)
        self.encryptions_performed += int(np.size(states[0]))
        return encrypt(self.params, self._keys, states)

    def grading_keys(self) -> KeySchedule:
        """Planted schedule, for graders only; attack code never calls this."""
        return self._keys

    def decrypt(self, ciphertext):
        return decrypt(self.params, self._keys, ciphertext)


class RandomPermutationOracle(Oracle):
    """Lazily sampled uniform permutation of the full 2n- or 4n-bit block.

    Presents the same shape (``params``) as the cipher it impersonates.
    """

    def __init__(self, params: CipherParams, seed: int,
                 mode: OracleMode | str = OracleMode.Q2_SUPERPOSITION):
        super().__init__(params, mode)
        self._words = 4 if params.variant.four_branch else 2
        self._rng = np.random.default_rng(seed)
        self._forward: dict[int, int] = {}
        self._used: set[int] = set()

    def _image(self, block: int) -> int:
        out = self._forward.get(block)
        if out is None:
            bits = self._words * self.n
            while True:
                out = int(self._rng.integers(0, 1 << bits)) if bits < 63 else int.from_bytes(
                    self._rng.bytes((bits + 7) // 8), "big") & ((1 << bits) - 1)
                if out not in self._used:
                    break
            self._forward[block] = out
            self._used.add(out)
        return out

    def _encrypt_batch(self, states):
        n, mask = self.n, (1 << self.n) - 1
        words = [np.asarray(w, dtype=np.int64) for w in states]
        shape = np.broadcast(*words).shape
        words = [np.broadcast_to(w, shape).ravel() for w in words]
        self.encryptions_performed += len(words[0])
        outs = np.empty((self._words, len(words[0])), dtype=np.int64)
        for i, vals in enumerate(zip(*(w.tolist() for w in words))):
            block = 0
            for v in vals:
                block = (block << n) | v
            image = self._image(block)
            for j in range(self._words - 1, -1, -1):
                outs[j, i] = image & mask
                image >>= n
        cls = State4 if self._words == 4 else FeistelState
        return cls(*(o.reshape(shape) for o in outs))


class PublicFunctions:
    """Attacker-side evaluation of the public round functions.

    Every element evaluated is tallied in ``counter.offline_evaluations``.
    """

    def __init__(self, family, counter: Optional[QueryCounter] = None):
        self.family = family
        self.counter = counter

    def __call__(self, rnd: int, branch: int, x, key=None):
        if self.counter is not None:
            self.counter.offline_evaluations += int(np.broadcast(x, 0 if key is None else key).size)
        return self.family(rnd, branch, x, key)

    def table(self, rnd: int, branch: int, key=None) -> np.ndarray:
        """Whole truth table; counted as 2^n evaluations."""
        if self.counter is not None:
            self.counter.offline_evaluations += 1 << self.family.n
        return self.family.table(rnd, branch, key)

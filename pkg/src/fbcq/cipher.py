"""Four-branch FBC-F/KF/FK rounds and two-branch Feistel-F/KF/FK rounds.

Words are plain Python ints (or numpy integer arrays, element-wise) holding
``n`` bits. Every round function accepts arrays, so a whole batch of states
(one per plaintext, or one per key guess) can be pushed through at once.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

MIN_WIDTH = 2
MAX_WIDTH = 16
MAX_ROUNDS = 32
# keyed 2-D tables (2^n keys x 2^n inputs) are only materialized up to this width
TABLE2D_MAX_WIDTH = 12

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

WordLike = Union[int, np.ndarray]


class ParameterError(ValueError):
    """Raised on width, round-count, or variant mismatches."""


class Variant(str, enum.Enum):
    FBC_F = "FBC_F"
    FBC_KF = "FBC_KF"
    FBC_FK = "FBC_FK"
    FEISTEL_F = "FEISTEL_F"
    FEISTEL_KF = "FEISTEL_KF"
    FEISTEL_FK = "FEISTEL_FK"

    @property
    def four_branch(self) -> bool:
        return self.name.startswith("FBC")

    @property
    def injection(self) -> str:
        """Key injection mode: ``"F"`` keyed function, ``"KF"`` key into input, ``"FK"`` key onto output."""
        return self.name.split("_")[1]


class State4(NamedTuple):
    x0: WordLike
    x1: WordLike
    x2: WordLike
    x3: WordLike


class FeistelState(NamedTuple):
    a: WordLike
    b: WordLike


# -- seeded round-function family -------------------------------------------


def _mix64_int(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _M1) & _MASK64
    z = ((z ^ (z >> 27)) * _M2) & _MASK64
    return z ^ (z >> 31)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _prefix(seed: int, rnd: int, branch: int, keyed: bool) -> int:
    tag = (rnd << 8) | (branch << 4) | int(keyed)
    return _mix64_int((seed & _MASK64) ^ ((tag + 1) * _GOLDEN & _MASK64))


def prf_reference(seed: int, rnd: int, branch: int, key: int | None, x: int, n: int) -> int:
    """Scalar big-int evaluation of the generator behind :class:`RoundFunctions`.

    Kept deliberately separate from the vectorized path so tests can use it as
    an independent expansion of the same seeded generator.
    """
    h = _prefix(seed, rnd, branch, key is not None)
    h = _mix64_int(h ^ (key or 0))
    return _mix64_int(h ^ x) & ((1 << n) - 1)


def _prf_vector(seed: int, rnd: int, branch: int, key, x: np.ndarray, n: int) -> np.ndarray:
    with np.errstate(over="ignore"):
        h = np.uint64(_prefix(seed, rnd, branch, key is not None))
        k = np.asarray(0 if key is None else key, dtype=np.uint64)
        h = _mix64(h ^ k)
        out = _mix64(h ^ np.asarray(x, dtype=np.uint64))
    return (out & np.uint64((1 << n) - 1)).astype(np.int64)


@functools.lru_cache(maxsize=4096)
def _table(seed: int, n: int, mode: str, rnd: int, branch: int, key: int | None) -> np.ndarray:
    size = 1 << n
    if mode == "zero":
        tab = np.zeros(size, dtype=np.int64)
    else:
        tab = _prf_vector(seed, rnd, branch, key, np.arange(size, dtype=np.int64), n)
        if mode == "permutation":
            tab = np.argsort(tab, kind="stable").astype(np.int64)
    tab.setflags(write=False)
    return tab


@functools.lru_cache(maxsize=64)
def _table2d(seed: int, n: int, mode: str, rnd: int, branch: int) -> np.ndarray:
    size = 1 << n
    tab = np.stack([_table(seed, n, mode, rnd, branch, k) for k in range(size)])
    tab.setflags(write=False)
    return tab


@dataclass(frozen=True)
class RoundFunctions:
    """Publicly seeded family realizing every F_b^i of a cipher instance.

    ``mode`` is ``"random"`` (general functions), ``"permutation"`` (each
    F is a bijection of {0,1}^n) or ``"zero"`` (the constant-zero fixture that
    collapses every round to XOR wiring).
    """

    n: int
    seed: int = 0
    mode: str = "random"

    def __post_init__(self):
        if not MIN_WIDTH <= self.n <= MAX_WIDTH:
            raise ParameterError(f"width n={self.n} outside [{MIN_WIDTH}, {MAX_WIDTH}]")
        if self.mode not in ("random", "permutation", "zero"):
            raise ParameterError(f"unknown function mode {self.mode!r}")

    @classmethod
    def zero(cls, n: int) -> "RoundFunctions":
        return cls(n=n, seed=0, mode="zero")

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    def table(self, rnd: int, branch: int, key: int | None = None) -> np.ndarray:
        """Full truth table of F_branch^rnd (under ``key`` when keyed)."""
        if key is not None:
            key = int(key)
        return _table(self.seed, self.n, self.mode, rnd, branch, key)

    def keyed_table(self, rnd: int, branch: int) -> np.ndarray:
        """2-D table indexed ``[key, x]`` for batched evaluation under many keys."""
        if self.n > TABLE2D_MAX_WIDTH:
            raise ParameterError(f"keyed table not materialized for n={self.n}")
        return _table2d(self.seed, self.n, self.mode, rnd, branch)

    def __call__(self, rnd: int, branch: int, x: WordLike, key: WordLike | None = None) -> WordLike:
        if key is None or np.ndim(key) == 0:
            out = self.table(rnd, branch, key)[x]
        elif self.n <= TABLE2D_MAX_WIDTH:
            out = self.keyed_table(rnd, branch)[key, x]
        elif self.mode == "random":
            out = _prf_vector(self.seed, rnd, branch, key, x, self.n)
        else:
            out = np.vectorize(lambda k, v: self.table(rnd, branch, int(k))[v])(key, x)
        return int(out) if np.ndim(out) == 0 else out


def prf_eval(family: RoundFunctions, rnd: int, branch: int, key: int | None, x: int) -> int:
    if branch not in (1, 2):
        raise ParameterError(f"branch must be 1 or 2, got {branch}")
    check_word(x, family.n)
    if key is not None:
        check_word(key, family.n)
    return int(family(rnd, branch, x, key))


def check_word(value: WordLike, n: int) -> None:
    if np.ndim(value) == 0:
        if not 0 <= int(value) < (1 << n):
            raise ParameterError(f"word {value!r} does not fit in {n} bits")
    else:
        arr = np.asarray(value)
        if arr.size and (arr.min() < 0 or arr.max() >= (1 << n)):
            raise ParameterError(f"array words do not fit in {n} bits")


# -- parameters and key schedules ---------------------------------------------


@dataclass(frozen=True)
class CipherParams:
    variant: Variant
    n: int
    r: int
    seed: int = 0
    functions: str = "random"

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not MIN_WIDTH <= self.n <= MAX_WIDTH:
            raise ParameterError(f"width n={self.n} outside [{MIN_WIDTH}, {MAX_WIDTH}]")
        if not 1 <= self.r <= MAX_ROUNDS:
            raise ParameterError(f"round count r={self.r} outside [1, {MAX_ROUNDS}]")

    @property
    def family(self) -> RoundFunctions:
        return RoundFunctions(self.n, self.seed, self.functions)


@dataclass(frozen=True)
class KeySchedule:
    """Per-round subkey pairs; ``rounds[i]`` is (k_1^{i+1}, k_2^{i+1}).

    Two-branch variants only use the first key of each pair.
    """

    rounds: tuple
    n: int = field(default=16)

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.rounds)
        for a, b in pairs:
            check_word(a, self.n)
            check_word(b, self.n)
        object.__setattr__(self, "rounds", pairs)

    def __len__(self) -> int:
        return len(self.rounds)

    def __getitem__(self, rnd: int) -> tuple[int, int]:
        """Pair for 1-indexed round ``rnd``."""
        if not 1 <= rnd <= len(self.rounds):
            raise ParameterError(f"round {rnd} outside schedule of length {len(self.rounds)}")
        return self.rounds[rnd - 1]

    @classmethod
    def random(cls, n: int, r: int, rng: np.random.Generator) -> "KeySchedule":
        keys = rng.integers(0, 1 << n, size=(r, 2))
        return cls(tuple(map(tuple, keys.tolist())), n)

    def prefix(self, r: int) -> "KeySchedule":
        return KeySchedule(self.rounds[:r], self.n)

    def to_json(self) -> list:
        return [[format(a, "x"), format(b, "x")] for a, b in self.rounds]


def _check_schedule(params: CipherParams, keys: KeySchedule) -> None:
    if len(keys) != params.r:
        raise ParameterError(f"schedule has {len(keys)} rounds, params expect {params.r}")
    if keys.n != params.n:
        raise ParameterError(f"schedule width {keys.n} != params width {params.n}")


# -- round maps ------------------------------------------------------------


def keyed_f(injection: str, family: RoundFunctions, rnd: int, branch: int, x: WordLike, key: WordLike) -> WordLike:
    """F_branch^rnd applied with the variant's key injection."""
    if injection == "F":
        return family(rnd, branch, x, key)
    if injection == "KF":
        return family(rnd, branch, x ^ key)
    if injection == "FK":
        return family(rnd, branch, x) ^ key
    raise ParameterError(f"unknown key injection {injection!r}")


def _fbc_variant(variant) -> Variant:
    variant = Variant(variant)
    if not variant.four_branch:
        raise ParameterError(f"{variant.value} is not a four-branch variant")
    return variant


def fbc_round_with(variant, state: State4, rnd: int, k1: WordLike, k2: WordLike, family: RoundFunctions) -> State4:
    inj = _fbc_variant(variant).injection
    x0, x1, x2, x3 = state
    a = keyed_f(inj, family, rnd, 1, x0, k1)
    c = keyed_f(inj, family, rnd, 2, x3, k2)
    return State4(x1 ^ a, x0 ^ x2 ^ c, x3 ^ x1 ^ a, x2 ^ c)


def fbc_round_inverse_with(variant, state: State4, rnd: int, k1: WordLike, k2: WordLike, family: RoundFunctions) -> State4:
    inj = _fbc_variant(variant).injection
    y0, y1, y2, y3 = state
    x0 = y1 ^ y3
    x3 = y0 ^ y2
    x1 = y0 ^ keyed_f(inj, family, rnd, 1, x0, k1)
    x2 = y3 ^ keyed_f(inj, family, rnd, 2, x3, k2)
    return State4(x0, x1, x2, x3)


def fbc_round(variant, state: State4, rnd: int, keys: KeySchedule, family: RoundFunctions) -> State4:
    k1, k2 = keys[rnd]
    return fbc_round_with(variant, State4(*state), rnd, k1, k2, family)


def fbc_round_inverse(variant, state: State4, rnd: int, keys: KeySchedule, family: RoundFunctions) -> State4:
    k1, k2 = keys[rnd]
    return fbc_round_inverse_with(variant, State4(*state), rnd, k1, k2, family)


def feistel_round_with(variant, state: FeistelState, rnd: int, k: WordLike, family: RoundFunctions) -> FeistelState:
    variant = Variant(variant)
    if variant.four_branch:
        raise ParameterError(f"{variant.value} is not a two-branch variant")
    a, b = state
    return FeistelState(b ^ keyed_f(variant.injection, family, rnd, 1, a, k), a)


def feistel_round_inverse_with(variant, state: FeistelState, rnd: int, k: WordLike, family: RoundFunctions) -> FeistelState:
    variant = Variant(variant)
    if variant.four_branch:
        raise ParameterError(f"{variant.value} is not a two-branch variant")
    a, b = state
    return FeistelState(b, a ^ keyed_f(variant.injection, family, rnd, 1, b, k))


# -- full encryption -------------------------------------------------------


def encrypt(params: CipherParams, keys: KeySchedule, plaintext):
    if not params.variant.four_branch:
        return feistel_encrypt(params, keys, plaintext)
    _check_schedule(params, keys)
    state = State4(*plaintext)
    for word in state:
        check_word(word, params.n)
    family = params.family
    for rnd in range(1, params.r + 1):
        state = fbc_round(params.variant, state, rnd, keys, family)
    return state


def decrypt(params: CipherParams, keys: KeySchedule, ciphertext):
    if not params.variant.four_branch:
        return feistel_decrypt(params, keys, ciphertext)
    _check_schedule(params, keys)
    return decrypt_partial(params.variant, State4(*ciphertext), keys.rounds, params)


def decrypt_partial(variant, ciphertext: State4, last_round_keys: Sequence, params: CipherParams) -> State4:
    """Peel the last ``len(last_round_keys)`` rounds off ``ciphertext``.

    ``last_round_keys`` lists (k1, k2) pairs in ascending round order, i.e.
    its final entry belongs to round ``params.r``. Keys may be guesses, and
    may be numpy arrays broadcasting against the state words.
    """
    t = len(last_round_keys)
    if t > params.r:
        raise ParameterError(f"cannot peel {t} rounds from an {params.r}-round cipher")
    state = State4(*ciphertext)
    family = params.family
    for offset, (k1, k2) in enumerate(reversed(list(last_round_keys))):
        state = fbc_round_inverse_with(variant, state, params.r - offset, k1, k2, family)
    return state


def feistel_encrypt(params: CipherParams, keys: KeySchedule, p) -> FeistelState:
    _check_schedule(params, keys)
    state = FeistelState(*p)
    for word in state:
        check_word(word, params.n)
    family = params.family
    for rnd in range(1, params.r + 1):
        state = feistel_round_with(params.variant, state, rnd, keys[rnd][0], family)
    return state


def feistel_decrypt(params: CipherParams, keys: KeySchedule, c) -> FeistelState:
    _check_schedule(params, keys)
    state = FeistelState(*c)
    family = params.family
    for rnd in range(params.r, 0, -1):
        state = feistel_round_inverse_with(params.variant, state, rnd, keys[rnd][0], family)
    return state


# -- serialization ---------------------------------------------------------


def state_to_json(state) -> list:
    return [format(int(w), "x") for w in state]


def state_from_json(words: Sequence[str]):
    values = [int(w, 16) for w in words]
    if len(values) == 4:
        return State4(*values)
    if len(values) == 2:
        return FeistelState(*values)
    raise ParameterError(f"expected 2 or 4 words, got {len(values)}")

"""Key-aware recomputations used only for grading.

Everything here needs the planted key schedule, so attack code must never
import this module (a test enforces that).
"""

from __future__ import annotations

import numpy as np

from .cipher import CipherParams, KeySchedule, RoundFunctions, State4, encrypt
from .distinguishers import DistinguisherConfig


def expected_period_fbcf(family: RoundFunctions, keys: KeySchedule, cfg: DistinguisherConfig) -> int:
    """F_1^2(F_1^1(c0) ^ a0) ^ F_1^2(F_1^1(c0) ^ a1), keyed functions."""
    k11, k12 = keys[1][0], keys[2][0]
    head = family(1, 1, cfg.c0, k11)
    return int(family(2, 1, head ^ cfg.alpha0, k12) ^ family(2, 1, head ^ cfg.alpha1, k12))


def expected_period_fbckf(family: RoundFunctions, keys: KeySchedule, cfg: DistinguisherConfig) -> int:
    """F_1^2(a_b ^ k_1^2 ^ F_1^1(c0 ^ k_1^1)) XORed over b."""
    k11, k12 = keys[1][0], keys[2][0]
    head = k12 ^ family(1, 1, cfg.c0 ^ k11)
    return int(family(2, 1, cfg.alpha0 ^ head) ^ family(2, 1, cfg.alpha1 ^ head))


def expected_period_fbcfk(family: RoundFunctions, keys: KeySchedule, cfg: DistinguisherConfig) -> int:
    """F_1^3(a_b ^ k_2^1 ^ k_1^2 ^ F_1^2(c0 ^ k_1^1)) XORed over b."""
    (k11, k21), (k12, _) = keys[1], keys[2]
    head = k21 ^ k12 ^ family(2, 1, cfg.c0 ^ k11)
    return int(family(3, 1, cfg.alpha0 ^ head) ^ family(3, 1, cfg.alpha1 ^ head))


EXPECTED_PERIOD = {
    "fbc-f-4r": expected_period_fbcf,
    "fbc-kf-4r": expected_period_fbckf,
    "fbc-fk-6r": expected_period_fbcfk,
}


def intermediate_state(params: CipherParams, keys: KeySchedule, plaintext, rounds: int):
    """State after the first ``rounds`` rounds."""
    if rounds == 0:
        return type(plaintext)(*plaintext)
    sub = CipherParams(params.variant, params.n, rounds, params.seed, params.functions)
    return encrypt(sub, keys.prefix(rounds), plaintext)


def x03_pair_xor(params: CipherParams, keys: KeySchedule, cfg: DistinguisherConfig, x) -> np.ndarray:
    """x_0^3(alpha0) ^ x_0^3(alpha1) computed forward from internal states."""
    x = np.asarray(x, dtype=np.int64)
    out = 0
    for alpha in cfg.alphas:
        pt = State4(np.full_like(x, cfg.c0), np.full_like(x, alpha), x, np.full_like(x, cfg.c3))
        out = out ^ intermediate_state(params, keys, pt, 3).x0
    return out

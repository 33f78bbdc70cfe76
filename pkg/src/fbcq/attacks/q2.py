"""r-round key recovery in the superposition-query model.

Each attack appends rounds to a distinguisher, guesses the trailing subkeys
needed to strip them, and keeps every guess whose stripped function Simon
finds periodic. All guesses are tested at once: ciphertexts for the whole
domain are obtained once per constant set, each guess turns them into one
truth table, and :func:`simon_batch` runs the independent Simon instances.

A guess is rejected only after failing under several independently drawn
constant sets, so a planted guess whose period happens to vanish for one
set (the round function colliding on the two alpha inputs) still survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..cipher import CipherParams, State4, Variant, decrypt_partial, keyed_f
from ..distinguishers import DistinguisherConfig, fbc4_plaintexts, fbcfk6_output, fbcfk6_plaintexts
from ..oracle import Oracle, PublicFunctions
from ..simon import SimonConfig, simon_batch
from .common import AttackReport, check_guard, nominal_grover_bits


@dataclass(frozen=True)
class Q2Config:
    constant_sets: Optional[int] = None  # None: max(2, ceil(14 / n))
    override_guard: bool = False
    chunk_cells: int = 1 << 20

    def sets_for(self, n: int) -> int:
        return self.constant_sets if self.constant_sets is not None else max(2, math.ceil(14 / n))


def trailing_labels_fbcf(r: int) -> List[str]:
    labels = []
    for i in range(7, r + 1):
        labels += [f"k1^{i}", f"k2^{i}"]
    return labels + ["k1^5", "k1^6", "k2^6"]


def trailing_labels_fbcfk(r: int) -> List[str]:
    labels = []
    for i in range(7, r + 1):
        labels += [f"k1^{i}", f"k2^{i}"]
    return labels


def x03_from_round6(variant: Variant, family, state: State4, k15, k16, k26):
    """x_1^4 ^ x_3^4 from the round-6 state using only k_1^5, k_1^6, k_2^6.

    x_0^5 = y1^y3 and x_3^5 = y0^y2 are key-free; x_1^5 and x_2^5 need one
    F evaluation each, and x_1^4 ^ x_3^4 = F_1^5(x_1^5 ^ x_3^5) ^ x_2^5.
    """
    inj = variant.injection
    y0, y1, y2, y3 = state
    x05, x35 = y1 ^ y3, y0 ^ y2
    x15 = y0 ^ keyed_f(inj, family, 6, 1, x05, k16)
    x25 = y3 ^ keyed_f(inj, family, 6, 2, x35, k26)
    return keyed_f(inj, family, 5, 1, x15 ^ x35, k15) ^ x25


def _decode(guesses: np.ndarray, count: int, n: int) -> List[np.ndarray]:
    mask = (1 << n) - 1
    return [((guesses >> (n * j)) & mask)[:, None] for j in range(count)]


def _pairs(words: List[np.ndarray], rounds: int) -> list:
    return [(words[2 * i], words[2 * i + 1]) for i in range(rounds)]


def _run(oracle: Oracle, params: CipherParams, attack_id: str, labels: List[str], cfg: Q2Config,
         simon_cfg: SimonConfig, rng: np.random.Generator, ciphertexts_for, tables_for) -> AttackReport:
    n, r = params.n, params.r
    bits = n * len(labels)
    report = AttackReport(attack_id, params.variant.value, n, r, guessed_bits=bits)
    report.notes["grover_log2_nominal"] = round(nominal_grover_bits(bits), 3) if bits else 0.0
    report.notes["grover_exponent"] = bits / 2
    pending = np.arange(1 << bits, dtype=np.int64)
    sets = cfg.sets_for(n)
    rows = max(1, cfg.chunk_cells >> n)
    for t in range(sets):
        if not len(pending):
            break
        dcfg = DistinguisherConfig.random(n, rng)
        cts = ciphertexts_for(dcfg)
        still = []
        for lo in range(0, len(pending), rows):
            guesses = pending[lo:lo + rows]
            words = _decode(guesses, len(labels), n)
            tables = tables_for(cts, words)
            res = simon_batch(tables, n, simon_cfg, rng)
            report.search_evaluations += len(guesses)
            oracle.counter.superposition_query_units += int(res.rounds_used.sum())
            for i in np.flatnonzero(res.found):
                entry = {lab: int(w[i, 0]) for lab, w in zip(labels, words)}
                entry.update(period=int(res.period[i]), constant_set=t)
                report.survivors.append(entry)
            still.append(guesses[~res.found])
        pending = np.concatenate(still) if still else pending[:0]
    report.notes["constant_sets"] = sets
    report.survivors.sort(key=lambda s: [s[lab] for lab in labels])
    report.set_recovered(report.survivors, labels)
    report.chain_count = len(report.survivors)
    report.status = "survivors" if report.survivors else "empty"
    report.counters = oracle.counter.to_dict()
    return report


def _q2_fbc4(oracle: Oracle, params: CipherParams, variant: Variant, attack_id: str,
             cfg: Q2Config | None, simon_cfg: SimonConfig | None, rng: np.random.Generator) -> AttackReport:
    cfg = cfg or Q2Config()
    if params.r < 6:
        raise ValueError("the attack needs at least 6 rounds")
    labels = trailing_labels_fbcf(params.r)
    check_guard(params.n * len(labels), attack_id, cfg.override_guard)
    family = oracle.family
    xs = np.arange(1 << params.n, dtype=np.int64)
    extra = params.r - 6

    def ciphertexts_for(dcfg):
        access = oracle.superposed()
        return [State4(*(w[None, :] for w in access.encrypt(fbc4_plaintexts(dcfg, a, xs)))) for a in dcfg.alphas]

    def tables_for(cts, words):
        pairs = _pairs(words, extra)
        k15, k16, k26 = words[2 * extra:]
        out = 0
        for ct in cts:
            state6 = decrypt_partial(variant, ct, pairs, params)
            out = out ^ x03_from_round6(variant, family, state6, k15, k16, k26)
        return np.broadcast_to(out, (len(k15), len(xs)))

    return _run(oracle, params, attack_id, labels, cfg, simon_cfg or SimonConfig(), rng,
                ciphertexts_for, tables_for)


def q2_recover_fbcf(oracle: Oracle, params: CipherParams, cfg: Q2Config | None = None,
                    simon_cfg: SimonConfig | None = None, rng: np.random.Generator | None = None) -> AttackReport:
    """Guess (k_1^i, k_2^i) for i = 7..r plus k_1^5, k_1^6, k_2^6 and test
    periodicity of the 4-round FBC-F function on the stripped outputs."""
    rng = rng if rng is not None else np.random.default_rng()
    return _q2_fbc4(oracle, params, Variant.FBC_F, "q2-fbcf", cfg, simon_cfg, rng)


def q2_recover_fbckf(oracle: Oracle, params: CipherParams, cfg: Q2Config | None = None,
                     simon_cfg: SimonConfig | None = None, rng: np.random.Generator | None = None) -> AttackReport:
    """Same guess set and procedure as :func:`q2_recover_fbcf`, against FBC-KF."""
    rng = rng if rng is not None else np.random.default_rng()
    return _q2_fbc4(oracle, params, Variant.FBC_KF, "q2-fbckf", cfg, simon_cfg, rng)


def q2_recover_fbcfk(oracle: Oracle, params: CipherParams, cfg: Q2Config | None = None,
                     simon_cfg: SimonConfig | None = None, rng: np.random.Generator | None = None) -> AttackReport:
    """Guess the (r-6) trailing round-key pairs, strip them and test the
    6-round FBC-FK function for periodicity."""
    rng = rng if rng is not None else np.random.default_rng()
    cfg = cfg or Q2Config()
    if params.r < 6:
        raise ValueError("the attack needs at least 6 rounds")
    labels = trailing_labels_fbcfk(params.r)
    check_guard(params.n * len(labels), "q2-fbcfk", cfg.override_guard)
    F = PublicFunctions(oracle.family, oracle.counter)
    xs = np.arange(1 << params.n, dtype=np.int64)

    def ciphertexts_for(dcfg):
        access = oracle.superposed()
        return [State4(*(w[None, :] for w in access.encrypt(fbcfk6_plaintexts(F, dcfg, a, xs)))) for a in dcfg.alphas]

    def tables_for(cts, words):
        pairs = _pairs(words, len(words) // 2)
        rows = len(words[0]) if words else 1
        out = 0
        for ct in cts:
            state6 = decrypt_partial(Variant.FBC_FK, ct, pairs, params)
            out = out ^ fbcfk6_output(F, state6)
        return np.broadcast_to(out, (rows, len(xs)))

    return _run(oracle, params, "q2-fbcfk", labels, cfg, simon_cfg or SimonConfig(), rng,
                ciphertexts_for, tables_for)

"""Low-data key recovery with classical queries only.

Each attack asks a constant number of chosen plaintexts, then solves one
n-bit unknown at a time by exhaustive search (standing in for Grover).
Every solve keeps all roots and forks the candidate chain; later equations
prune the chains and four fresh plaintext-ciphertext pairs decide between
the survivors.

Adaptive queries (the Feistel attack) are asked with a representative
candidate; the other chains are carried through algebraically, so the query
count stays fixed whatever the branching.
"""

from __future__ import annotations

from typing import Dict, List

import numpy as np

from ..cipher import CipherParams, FeistelState, KeySchedule, State4, Variant, encrypt, fbc_round_with
from ..oracle import Oracle, PublicFunctions
from .common import CHAIN_CAP, AttackReport, ChainOverflow, ChainSearch

VERIFY_PAIRS = 4

FEISTEL_LABELS = ["k0", "k1", "k2"]


def fbc_labels(r: int) -> List[str]:
    return [f"k{b}^{i}" for i in range(1, r + 1) for b in (1, 2)]


def schedule_from(chain: Dict[str, int], r: int, n: int) -> KeySchedule:
    return KeySchedule(tuple((chain[f"k1^{i}"], chain[f"k2^{i}"]) for i in range(1, r + 1)), n)


def feistel_schedule_from(chain: Dict[str, int], n: int) -> KeySchedule:
    return KeySchedule(tuple((chain[lab], 0) for lab in FEISTEL_LABELS), n)


def _verify(oracle: Oracle, params: CipherParams, chains: List[dict], to_schedule,
            rng: np.random.Generator) -> List[dict]:
    words = 4 if params.variant.four_branch else 2
    pts = tuple(rng.integers(0, 1 << params.n, size=VERIFY_PAIRS, dtype=np.int64) for _ in range(words))
    cts = oracle.query_batch(pts)
    keep = []
    for ch in chains:
        guess = encrypt(params, to_schedule(ch), pts)
        if all(np.array_equal(g, c) for g, c in zip(guess, cts)):
            keep.append(ch)
    return keep


def _finish(report: AttackReport, oracle: Oracle, params: CipherParams, chains: List[dict], labels,
            to_schedule, rng) -> AttackReport:
    verified = _verify(oracle, params, chains, to_schedule, rng)
    report.chain_count = len(chains)
    report.survivors = [{lab: int(ch[lab]) for lab in labels} for ch in verified]
    report.set_recovered(report.survivors, labels)
    report.status = "verified" if len(verified) == 1 else ("ambiguous" if verified else "failed")
    report.counters = oracle.counter.to_dict()
    return report


def _overflow(report: AttackReport, oracle: Oracle, exc: ChainOverflow) -> AttackReport:
    report.status = "overflow"
    report.notes["overflow"] = str(exc)
    report.counters = oracle.counter.to_dict()
    return report


def _distinct(rng: np.random.Generator, n: int, avoid=(), accept=lambda v: True, tries: int = 64) -> int:
    """A random word outside ``avoid`` satisfying ``accept`` when one turns up."""
    v = 0
    for _ in range(tries):
        v = int(rng.integers(0, 1 << n))
        if v not in avoid and accept(v):
            return v
    while v in avoid:
        v = (v + 1) % (1 << n)
    return v


# -- 3-round Feistel-KF -----------------------------------------------------------


def q1_recover_feistel_kf_3r(oracle: Oracle, n: int | None = None, rng: np.random.Generator | None = None,
                             cap: int = CHAIN_CAP) -> AttackReport:
    """Recover (k0, k1, k2) of 3-round Feistel-KF with 4 chosen plaintexts.

    With F0, F1, F2 the public round functions:
      (0, 0)        -> b3 = F1(beta1), beta1 = k1 ^ F0(k0)
      (1, beta1)    -> b3 = 1 ^ F1(beta2), beta2 = F0(k0) ^ F0(k0 ^ 1)
      (2, beta1)    -> separates k0 from k0 ^ 1
      (u, F0(k0^u)) with u = F1(k1) -> a3 = F2(k2)
    """
    params = oracle.params
    if params.variant is not Variant.FEISTEL_KF or params.r != 3:
        raise ValueError("expects a 3-round Feistel-KF oracle")
    n = params.n if n is None else n
    rng = rng if rng is not None else np.random.default_rng()
    report = AttackReport("q1-feistel-kf-3r", params.variant.value, n, 3)
    F = PublicFunctions(oracle.family, oracle.counter)
    S = ChainSearch(n, report, cap)
    F0 = lambda x: F(1, 1, x)
    F1 = lambda x: F(2, 1, x)
    F2 = lambda x: F(3, 1, x)
    try:
        b3 = oracle.query(FeistelState(0, 0)).b
        chains = S.fork([{}], "beta1", lambda ch: lambda v: F1(v) == b3)
        if not chains:
            return _finish(report, oracle, params, [], FEISTEL_LABELS, None, rng)
        rep = chains[0]["beta1"]
        b3 = oracle.query(FeistelState(1, rep)).b
        # for a chain with beta1 = c the queried F1 input is rep ^ c ^ beta2
        chains = S.fork(chains, "beta2", lambda ch: lambda v: F1(v ^ ch["beta1"] ^ rep) == b3 ^ 1)
        chains = S.fork(chains, "k0", lambda ch: lambda k: F0(k ^ 1) ^ F0(k) == ch["beta2"])
        b3 = oracle.query(FeistelState(2, rep)).b
        chains = [ch for ch in chains
                  if F1(rep ^ ch["beta1"] ^ F0(ch["k0"]) ^ F0(ch["k0"] ^ 2)) == b3 ^ 2]
        for ch in chains:
            ch["k1"] = ch["beta1"] ^ F0(ch["k0"])
        report.note("k0 (filtered)", [ch["k0"] for ch in chains])
        report.note("k1", [ch["k1"] for ch in chains])
        if not chains:
            return _finish(report, oracle, params, [], FEISTEL_LABELS, None, rng)
        k0r, k1r = chains[0]["k0"], chains[0]["k1"]
        u = F1(k1r)
        out = oracle.query(FeistelState(u, F0(k0r ^ u)))

        def k2_predicate(ch):
            a1 = F0(k0r ^ u) ^ F0(u ^ ch["k0"])
            a2 = u ^ F1(a1 ^ ch["k1"])
            return lambda k: F2(k ^ a2) == out.a ^ a1
        chains = S.fork(chains, "k2", k2_predicate)
    except ChainOverflow as exc:
        return _overflow(report, oracle, exc)
    return _finish(report, oracle, params, chains, FEISTEL_LABELS, lambda ch: feistel_schedule_from(ch, n), rng)


# -- 4-round FBC-KF ---------------------------------------------------------------


def q1_recover_fbckf_4r(oracle: Oracle, n: int | None = None, rng: np.random.Generator | None = None,
                        cap: int = CHAIN_CAP) -> AttackReport:
    """Recover all eight subkeys of 4-round FBC-KF from 6 chosen plaintexts.

    The output word y2 equals G1(p) = x_0^2 ^ F_1^4(k_1^4 ^ y1 ^ y3), with
    x_0^2 = x0 ^ x2 ^ F_2^1(x3 ^ k_2^1) ^ F_1^2(x1 ^ k_1^2 ^ F_1^1(x0 ^ k_1^1)).
    Differences of G1 over pairs of plaintexts that share all but one word
    isolate k_1^4, k_2^1, beta1, beta3 and then k_1^1, k_1^2. The word
    G2(p) = y1 ^ y3 = x_0^3 then gives k_1^3 and k_2^2, and the last two
    keys follow from the x_1^3 and y1 relations once rounds 1-2 are known.
    """
    params = oracle.params
    if params.variant is not Variant.FBC_KF or params.r != 4:
        raise ValueError("expects a 4-round FBC-KF oracle")
    n = params.n if n is None else n
    rng = rng if rng is not None else np.random.default_rng()
    report = AttackReport("q1-fbckf-4r", params.variant.value, n, 4)
    F = PublicFunctions(oracle.family, oracle.counter)
    S = ChainSearch(n, report, cap)
    labels = fbc_labels(4)

    c = _distinct(rng, n, avoid=(0,))
    cp = _distinct(rng, n, avoid=(c,))
    x1c = int(rng.integers(0, 1 << n))
    x1cp = _distinct(rng, n, avoid=(x1c,))
    x2c = int(rng.integers(0, 1 << n))
    c3 = int(rng.integers(0, 1 << n))
    c3p = _distinct(rng, n, avoid=(c3,))
    plaintexts = [(c, 0, c, 0), (c, 0, 0, 0), (c, x1c, x2c, c3), (c, x1c, x2c, c3p),
                  (c, x1cp, x2c, c3), (cp, x1c, x2c, c3)]
    P = np.array(plaintexts, dtype=np.int64).T  # words x queries
    Y = np.array([oracle.query(State4(*p)) for p in plaintexts], dtype=np.int64).T
    y0, y1, y2, y3 = Y
    u = y1 ^ y3
    report.notes["constants"] = {"c": c, "c'": cp, "x1": x1c, "x1'": x1cp, "x2": x2c, "x3": c3, "x3'": c3p}

    def x02(ch, p=P):
        x0, x1, x2, x3 = p
        return x0 ^ x2 ^ F(1, 2, x3 ^ ch["k2^1"]) ^ F(2, 1, x1 ^ ch["k1^2"] ^ F(1, 1, x0 ^ ch["k1^1"]))

    try:
        chains = S.fork([{}], "k1^4", lambda ch: lambda k: F(4, 1, k ^ u[0]) ^ F(4, 1, k ^ u[1]) == y2[0] ^ y2[1] ^ c)

        def f14(ch, i):
            return F(4, 1, ch["k1^4"] ^ u[i])

        for ch in chains:
            ch["C1"] = f14(ch, 2) ^ f14(ch, 3)
            ch["C2"] = f14(ch, 2) ^ f14(ch, 4)
            ch["C3"] = f14(ch, 2) ^ f14(ch, 5) ^ c ^ cp
        report.note("C1", [ch["C1"] for ch in chains])
        chains = S.fork(chains, "k2^1", lambda ch: lambda k: F(1, 2, c3 ^ k) ^ F(1, 2, c3p ^ k) == y2[2] ^ y2[3] ^ ch["C1"])
        delta = x1c ^ x1cp
        chains = S.fork(chains, "beta1", lambda ch: lambda b: F(2, 1, b) ^ F(2, 1, b ^ delta) == y2[2] ^ y2[4] ^ ch["C2"])
        chains = S.fork(chains, "beta3",
                        lambda ch: lambda b: F(2, 1, b) == y2[2] ^ y2[5] ^ ch["C3"] ^ F(2, 1, ch["beta1"]))
        chains = S.fork(chains, "k1^1",
                        lambda ch: lambda k: F(1, 1, c ^ k) ^ F(1, 1, cp ^ k) == ch["beta1"] ^ ch["beta3"])
        for ch in chains:
            ch["k1^2"] = ch["beta1"] ^ x1c ^ F(1, 1, c ^ ch["k1^1"])
        chains = [ch for ch in chains if np.array_equal(y2, x02(ch) ^ F(4, 1, ch["k1^4"] ^ u))]
        report.note("k1^2", [ch["k1^2"] for ch in chains])

        for ch in chains:
            ch["w"] = x02(ch)
        chains = S.fork(chains, "k1^3", lambda ch: lambda k: (
            (F(3, 1, ch["w"][2] ^ k) ^ F(3, 1, ch["w"][4] ^ k) == u[2] ^ u[4])
            & (F(3, 1, ch["w"][2] ^ k) ^ F(3, 1, ch["w"][5] ^ k) == u[2] ^ u[5])))
        chains = S.fork(chains, "k2^2", lambda ch: lambda k: (
            c3 ^ F(2, 2, x2c ^ F(1, 2, c3 ^ ch["k2^1"]) ^ k) ^ F(3, 1, ch["w"][2] ^ ch["k1^3"]) == u[2]))

        def g2(ch):
            x0, x1, x2, x3 = P
            return x3 ^ F(2, 2, x2 ^ F(1, 2, x3 ^ ch["k2^1"]) ^ ch["k2^2"]) ^ F(3, 1, ch["w"] ^ ch["k1^3"])
        chains = [ch for ch in chains if np.array_equal(u, g2(ch))]

        for ch in chains:
            s = State4(*P)
            for rnd in (1, 2):
                s = fbc_round_with(Variant.FBC_KF, s, rnd, ch[f"k1^{rnd}"], ch[f"k2^{rnd}"], F)
            ch["x2"] = s
        chains = S.fork(chains, "k2^3", lambda ch: lambda k: np.all(
            F(3, 2, ch["x2"].x3[:, None] ^ k[None, :])
            == (y0 ^ F(4, 1, u ^ ch["k1^4"]) ^ ch["x2"].x0 ^ ch["x2"].x2)[:, None], axis=0))
        for ch in chains:
            ch["x3"] = fbc_round_with(Variant.FBC_KF, ch["x2"], 3, ch["k1^3"], ch["k2^3"], F)
        chains = S.fork(chains, "k2^4", lambda ch: lambda k: np.all(
            F(4, 2, ch["x3"].x3[:, None] ^ k[None, :]) == (y1 ^ ch["x3"].x0 ^ ch["x3"].x2)[:, None], axis=0))
    except ChainOverflow as exc:
        return _overflow(report, oracle, exc)
    return _finish(report, oracle, params, chains, labels, lambda ch: schedule_from(ch, 4, n), rng)


# -- 5-round FBC-FK ---------------------------------------------------------------


def q1_recover_fbcfk_5r(oracle: Oracle, n: int | None = None, rng: np.random.Generator | None = None,
                        cap: int = CHAIN_CAP) -> AttackReport:
    """Recover all ten subkeys of 5-round FBC-FK from 5 chosen plaintexts.

    H1 = F_1^5(y1 ^ y3) ^ y2 equals k_1^5 ^ x_0^3 and H2 = F_2^5(y0 ^ y2) ^ y1
    equals k_2^5 ^ x_3^3. The delta values are the round-2 words x_0^2
    (delta1, delta2, delta3 for q1, q2, q3) and x_3^2 (delta4 for q3).
    Once the first two rounds are known the remaining three are peeled by
    pairwise differences, each leaving one n-bit unknown.
    """
    params = oracle.params
    if params.variant is not Variant.FBC_FK or params.r != 5:
        raise ValueError("expects a 5-round FBC-FK oracle")
    n = params.n if n is None else n
    rng = rng if rng is not None else np.random.default_rng()
    report = AttackReport("q1-fbcfk-5r", params.variant.value, n, 5)
    F = PublicFunctions(oracle.family, oracle.counter)
    S = ChainSearch(n, report, cap)
    labels = fbc_labels(5)

    c = int(rng.integers(0, 1 << n))
    cp = _distinct(rng, n, avoid=(c,))
    f11c = F(1, 1, c)
    x1c = _distinct(rng, n, avoid=(f11c,))
    x1cp = _distinct(rng, n, avoid=(f11c, x1c))
    x2c = int(rng.integers(0, 1 << n))
    c3 = int(rng.integers(0, 1 << n))
    f21c3 = F(1, 2, c3)
    c3p = _distinct(rng, n, avoid=(c3,), accept=lambda v: F(1, 2, v) != f21c3)
    f21c3p = F(1, 2, c3p)
    plaintexts = [(c, f11c, x2c, c3), (cp, F(1, 1, cp), x2c, c3), (c, x1c, x2c, c3), (c, x1c, x2c, c3p),
                  (c, x1cp, x2c, c3)]
    P = np.array(plaintexts, dtype=np.int64).T
    Y = np.array([oracle.query(State4(*p)) for p in plaintexts], dtype=np.int64).T
    y0, y1, y2, y3 = Y
    H1 = F(5, 1, y1 ^ y3) ^ y2
    H2 = F(5, 2, y0 ^ y2) ^ y1
    report.notes["constants"] = {"c": c, "c'": cp, "x1": x1c, "x1'": x1cp, "x2": x2c, "x3": c3, "x3'": c3p}

    def round1(ch):
        return fbc_round_with(Variant.FBC_FK, State4(*P), 1, ch["k1^1"], ch["k2^1"], F)

    try:
        chains = S.fork([{}], "delta1", lambda ch: lambda d: F(3, 1, d) ^ F(3, 1, d ^ c ^ cp) == H1[0] ^ H1[1])
        for ch in chains:
            ch["delta2"] = ch["delta1"] ^ c ^ cp
        report.note("delta2", [ch["delta2"] for ch in chains])
        chains = S.fork(chains, "delta3", lambda ch: lambda d: F(3, 1, d) == H1[0] ^ H1[2] ^ F(3, 1, ch["delta1"]))
        chains = S.fork(chains, "k1^1", lambda ch: lambda k: (
            F(2, 1, k) ^ F(2, 1, k ^ x1c ^ f11c) == ch["delta1"] ^ ch["delta3"]))
        for ch in chains:
            d3 = ch["delta3"]
            ch["C4"] = c3 ^ c3p ^ F(3, 1, d3) ^ F(3, 1, d3 ^ f21c3 ^ f21c3p)
        report.note("C4", [ch["C4"] for ch in chains])
        chains = S.fork(chains, "k2^1", lambda ch: lambda k: (
            F(2, 2, x2c ^ k ^ f21c3) ^ F(2, 2, x2c ^ k ^ f21c3p) == H1[2] ^ H1[3] ^ ch["C4"]))
        for ch in chains:
            ch["k1^2"] = ch["delta1"] ^ c ^ x2c ^ f21c3 ^ ch["k2^1"] ^ F(2, 1, ch["k1^1"])
        report.note("k1^2", [ch["k1^2"] for ch in chains])

        def h1_consistent(ch):
            s1 = round1(ch)
            x02 = s1.x1 ^ F(2, 1, s1.x0) ^ ch["k1^2"]
            known = P[3] ^ F(2, 2, s1.x3) ^ F(3, 1, x02)  # x_0^3 without k_2^2 ^ k_1^3
            resid = H1 ^ known
            return bool(np.all(resid == resid[0]))
        chains = [ch for ch in chains if h1_consistent(ch)]

        for ch in chains:
            s1 = round1(ch)
            ch["x1"] = s1
            ch["x22"] = s1.x3 ^ s1.x1 ^ F(2, 1, s1.x0) ^ ch["k1^2"]
            ch["C6"] = int(ch["x22"][2] ^ ch["x22"][4])
        report.note("C6", [ch["C6"] for ch in chains])
        delta = x1c ^ x1cp
        chains = S.fork(chains, "delta4", lambda ch: lambda d: (
            F(3, 2, d) ^ F(3, 2, d ^ delta) == H2[2] ^ H2[4] ^ ch["C6"]))
        for ch in chains:
            s1 = ch["x1"]
            ch["k2^2"] = ch["delta4"] ^ int(s1.x2[2]) ^ F(2, 2, int(s1.x3[2]))
        report.note("k2^2", [ch["k2^2"] for ch in chains])

        for ch in chains:
            s2 = fbc_round_with(Variant.FBC_FK, ch["x1"], 2, ch["k1^2"], ch["k2^2"], F)
            ch["x2"] = s2
            ch["a"] = s2.x1 ^ F(3, 1, s2.x0)
            ch["e"] = (y1 ^ y3) ^ s2.x0 ^ s2.x2 ^ F(3, 2, s2.x3)
        chains = S.fork(chains, "k1^3", lambda ch: lambda k: np.all(
            (F(4, 1, ch["a"][0] ^ k)[None, :] ^ F(4, 1, ch["a"][1:, None] ^ k[None, :]))
            == (ch["e"][0] ^ ch["e"][1:])[:, None], axis=0))
        for ch in chains:
            s2 = ch["x2"]
            ch["kappa"] = int(ch["e"][0]) ^ F(4, 1, int(ch["a"][0]) ^ ch["k1^3"])  # k_1^4 ^ k_2^3
            ch["b"] = s2.x2 ^ F(3, 2, s2.x3)
            ch["g"] = y0 ^ y2 ^ (s2.x3 ^ ch["a"] ^ ch["k1^3"])
        chains = S.fork(chains, "k2^3", lambda ch: lambda k: np.all(
            (F(4, 2, ch["b"][0] ^ k)[None, :] ^ F(4, 2, ch["b"][1:, None] ^ k[None, :]))
            == (ch["g"][0] ^ ch["g"][1:])[:, None], axis=0))
        for ch in chains:
            ch["k2^4"] = int(ch["g"][0]) ^ F(4, 2, int(ch["b"][0]) ^ ch["k2^3"])
            ch["k1^4"] = ch["kappa"] ^ ch["k2^3"]
            ch["k1^5"] = int(H1[0]) ^ int(ch["a"][0]) ^ ch["k1^3"]
            ch["k2^5"] = int(H2[0]) ^ int(ch["b"][0]) ^ ch["k2^3"]
        report.note("k1^5", [ch["k1^5"] for ch in chains])
    except ChainOverflow as exc:
        return _overflow(report, oracle, exc)
    return _finish(report, oracle, params, chains, labels, lambda ch: schedule_from(ch, 5, n), rng)

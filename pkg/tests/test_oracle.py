import numpy as np
import pytest

from fbcq.cipher import CipherParams, KeySchedule, State4, Variant, encrypt
from fbcq.distinguishers import DistinguisherConfig, build_f_fbcf_4r, build_f_fbcfk_6r
from fbcq.oracle import (CipherOracle, ModeViolation, OracleMode, PeriodicFunctionHandle, PublicFunctions,
                         QueryCounter, RandomPermutationOracle)
from fbcq.simon import SimonConfig, simon_run


@pytest.fixture
def fbcf4(rng):
    params = CipherParams(Variant.FBC_F, 4, 4, seed=3)
    keys = KeySchedule.random(4, 4, rng)
    return params, keys


def test_fresh_counter_zero(fbcf4):
    o = CipherOracle(*fbcf4)
    assert o.counter == QueryCounter()


def test_query_matches_encrypt_and_counts(fbcf4):
    params, keys = fbcf4
    o = CipherOracle(params, keys, OracleMode.Q1_CLASSICAL)
    a = o.query(State4(1, 2, 3, 4))
    b = o.query(State4(1, 2, 3, 4))
    assert a == b == encrypt(params, keys, State4(1, 2, 3, 4))
    assert o.counter.classical_queries == 2


def test_query_batch_counts_each(fbcf4):
    o = CipherOracle(*fbcf4)
    o.query_batch(tuple(np.arange(5) for _ in range(4)))
    assert o.counter.classical_queries == 5


def test_q1_rejects_superposition(fbcf4):
    o = CipherOracle(*fbcf4, mode=OracleMode.Q1_CLASSICAL)
    with pytest.raises(ModeViolation):
        o.superposed()
    with pytest.raises(ModeViolation):
        build_f_fbcf_4r(o, DistinguisherConfig(1, 2, 3, 4))
    assert o.counter.superposition_query_units == 0


def test_one_simon_round_tallies_full_domain(fbcf4, rng):
    o = CipherOracle(*fbcf4)
    h = build_f_fbcf_4r(o, DistinguisherConfig(1, 2, 3, 4))
    res = simon_run(h, 4, SimonConfig(max_rounds=3), rng)
    assert o.counter.simulated_encryptions == 2 * 2**4
    assert o.counter.superposition_query_units == res.rounds_used
    assert o.counter.classical_queries == 0


def test_superposition_units_equal_rounds(fbcf4, rng):
    o = CipherOracle(*fbcf4)
    h = build_f_fbcf_4r(o, DistinguisherConfig(1, 2, 3, 4))
    total = 0
    for _ in range(3):
        total += simon_run(h, 4, None, rng).rounds_used
    assert o.counter.superposition_query_units == total


def test_accounting_completeness(fbcf4, rng):
    o = CipherOracle(*fbcf4)
    o.query(State4(0, 0, 0, 0))
    h = build_f_fbcf_4r(o, DistinguisherConfig(1, 2, 3, 4))
    h(np.arange(3))
    h.table()
    c = o.counter
    assert o.encryptions_performed == c.classical_queries + c.simulated_encryptions


def test_offline_evaluations_counted_for_public_functions(rng):
    params = CipherParams(Variant.FBC_FK, 4, 6, seed=1)
    o = CipherOracle(params, KeySchedule.random(4, 6, rng))
    build_f_fbcfk_6r(o, DistinguisherConfig(1, 2, 3, 4)).table()
    assert o.counter.offline_evaluations > 0
    assert o.encryptions_performed == o.counter.simulated_encryptions


def test_public_functions_tally():
    c = QueryCounter()
    F = PublicFunctions(CipherParams(Variant.FBC_KF, 4, 1).family, c)
    F(1, 1, np.arange(10))
    F(1, 2, 3)
    assert c.offline_evaluations == 11
    F.table(1, 1)
    assert c.offline_evaluations == 27


def test_counters_not_shared(fbcf4):
    a, b = CipherOracle(*fbcf4), CipherOracle(*fbcf4)
    a.query(State4(0, 0, 0, 0))
    assert b.counter.classical_queries == 0


def test_random_permutation_consistent_and_injective():
    o = RandomPermutationOracle(CipherParams(Variant.FBC_F, 3, 4), seed=5)
    xs = np.arange(1 << 12)
    words = (xs >> 9, (xs >> 6) & 7, (xs >> 3) & 7, xs & 7)
    out = o.query_batch(words)
    blocks = (out.x0 << 9) | (out.x1 << 6) | (out.x2 << 3) | out.x3
    assert len(np.unique(blocks)) == 1 << 12
    again = o.query(State4(1, 2, 3, 4))
    idx = (1 << 9) | (2 << 6) | (3 << 3) | 4
    assert tuple(again) == tuple(int(w[idx]) for w in out)


def test_handle_from_table_validates_shape():
    with pytest.raises(ValueError):
        PeriodicFunctionHandle.from_table(np.zeros(5), 3)
    h = PeriodicFunctionHandle.from_callable(lambda x: x & 1, 3)
    assert h(5) == 1 and h.table().tolist() == [0, 1] * 4

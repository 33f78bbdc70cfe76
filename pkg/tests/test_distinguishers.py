import ast
import pathlib

import numpy as np
import pytest

import fbcq
from fbcq.cipher import CipherParams, KeySchedule, RoundFunctions, Variant, decrypt, encrypt
from fbcq.distinguishers import (STRUCTURES, ConfigError, DistinguisherConfig, build_f_fbcf_4r, distinguish,
                                 fbc4_output, fbc4_plaintexts, structure_for)
from fbcq.oracle import CipherOracle, RandomPermutationOracle
from fbcq.simon import SimonConfig, brute_force_period
from fbcq.whitebox import EXPECTED_PERIOD, intermediate_state, x03_pair_xor


def instance(name, n, rng, functions="random"):
    variant, rounds, build = STRUCTURES[name]
    params = CipherParams(variant, n, rounds, seed=int(rng.integers(1 << 32)), functions=functions)
    keys = KeySchedule.random(n, rounds, rng)
    return params, keys, build


def test_equal_alphas_rejected():
    with pytest.raises(ConfigError):
        DistinguisherConfig(3, 3, 0, 0)


def test_random_config_distinct_alphas(rng):
    for _ in range(200):
        cfg = DistinguisherConfig.random(2, rng)
        assert cfg.alpha0 != cfg.alpha1


def test_structure_lookup():
    assert structure_for(Variant.FBC_FK) == "fbc-fk-6r"
    assert structure_for(Variant.FBC_F) == "fbc-f-4r"
    with pytest.raises(ConfigError):
        structure_for(Variant.FEISTEL_KF)


@pytest.mark.parametrize("name", list(STRUCTURES))
def test_closed_form_period_matches_exhaustive_n6(name, rng):
    for _ in range(10):
        params, keys, build = instance(name, 6, rng)
        cfg = DistinguisherConfig.random(6, rng)
        s = EXPECTED_PERIOD[name](params.family, keys, cfg)
        table = build(CipherOracle(params, keys), cfg).table()
        periods = brute_force_period(table, 6)
        if s:
            assert s in periods
            assert np.array_equal(table, table[np.arange(64) ^ s])


@pytest.mark.parametrize("name", list(STRUCTURES))
def test_period_nontrivial_for_random_functions(name, rng):
    nonzero = 0
    for _ in range(50):
        params, keys, _ = instance(name, 8, rng)
        nonzero += EXPECTED_PERIOD[name](params.family, keys, DistinguisherConfig.random(8, rng)) != 0
    assert nonzero >= 45


def test_zero_fixture_is_degenerate(rng):
    params, keys, build = instance("fbc-f-4r", 6, rng, functions="zero")
    cfg = DistinguisherConfig(1, 2, 3, 4)
    assert EXPECTED_PERIOD["fbc-f-4r"](params.family, keys, cfg) == 0
    v = distinguish(CipherOracle(params, keys), cfg, SimonConfig(), rng, "fbc-f-4r")
    assert v.decision == "RANDOM"


def test_output_equals_x03_xor(rng):
    # the ciphertext-side map reproduces the XOR of round-3 left words
    for name in ("fbc-f-4r", "fbc-kf-4r"):
        params, keys, build = instance(name, 8, rng)
        cfg = DistinguisherConfig.random(8, rng)
        x = np.arange(256)
        assert np.array_equal(build(CipherOracle(params, keys), cfg)(x), x03_pair_xor(params, keys, cfg, x))


def test_fbc4_output_is_x03(rng):
    params, keys, _ = instance("fbc-kf-4r", 8, rng)
    pt = fbc4_plaintexts(DistinguisherConfig(1, 2, 3, 4), 1, np.arange(256))
    assert np.array_equal(fbc4_output(encrypt(params, keys, pt)), intermediate_state(params, keys, pt, 3).x0)


def test_fk_output_equals_round4_word_plus_key(rng):
    params, keys, _ = instance("fbc-fk-6r", 8, rng)
    from fbcq.distinguishers import fbcfk6_output, fbcfk6_plaintexts
    F = params.family
    pt = fbcfk6_plaintexts(F, DistinguisherConfig(5, 9, 3, 4), 5, np.arange(256))
    got = fbcfk6_output(F, encrypt(params, keys, pt))
    assert np.array_equal(got, intermediate_state(params, keys, pt, 4).x0 ^ keys[6][0])


@pytest.mark.parametrize("name", list(STRUCTURES))
def test_genuine_and_impostor_verdicts(name, rng):
    cipher = rand = 0
    for _ in range(20):
        params, keys, _ = instance(name, 8, rng)
        cfg = DistinguisherConfig.random(8, rng)
        while EXPECTED_PERIOD[name](params.family, keys, cfg) == 0:
            cfg = DistinguisherConfig.random(8, rng)
        v = distinguish(CipherOracle(params, keys), cfg, None, rng, name)
        cipher += v.decision == "CIPHER"
        assert v.found_period in (None, EXPECTED_PERIOD[name](params.family, keys, cfg)) or v.multiple
        imp = RandomPermutationOracle(params, int(rng.integers(1 << 32)))
        rand += distinguish(imp, cfg, None, rng, name).decision == "RANDOM"
    assert cipher == 20
    assert rand >= 18


def test_handle_is_self_consistent(rng):
    params, keys, _ = instance("fbc-f-4r", 6, rng)
    h = build_f_fbcf_4r(CipherOracle(params, keys), DistinguisherConfig(1, 2, 3, 4))
    t = h.table()
    assert np.array_equal(h(np.arange(64)), t)
    assert int(h(7)) == int(t[7])


def test_attack_and_distinguisher_code_does_not_import_whitebox():
    root = pathlib.Path(fbcq.__file__).parent
    files = [root / "distinguishers.py", *sorted((root / "attacks").glob("*.py"))]
    for path in files:
        tree = ast.parse(path.read_text())
        for node in ast.walk(tree):
            if isinstance(node, ast.ImportFrom):
                assert "whitebox" not in (node.module or ""), path
                assert all(a.name != "whitebox" for a in node.names), path
            elif isinstance(node, ast.Import):
                assert all("whitebox" not in a.name for a in node.names), path

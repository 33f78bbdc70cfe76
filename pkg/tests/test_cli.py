import json

import jsonschema
import pytest

from fbcq import cli
from fbcq.attacks.common import GUARD_ENV
from fbcq.schema import SCHEMAS, schema_for


def run(argv, tmp_path, name="out.jsonl"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out), "--workers", "1"])
    text = out.read_text() if out.exists() else ""
    return code, text, [json.loads(line) for line in text.splitlines()]


def validate(records):
    for rec in records:
        jsonschema.validate(rec, schema_for(rec))


def test_distinguish_records_and_determinism(tmp_path):
    argv = ["distinguish", "--structure", "fbc-f-4r", "--n", "6", "--trials", "5", "--seed", "42"]
    code, text, recs = run(argv, tmp_path, "a.jsonl")
    code2, text2, _ = run(argv, tmp_path, "b.jsonl")
    assert code == code2 == 0
    assert text == text2
    assert [r["trial"] for r in recs] == list(range(5))
    assert all(r["schema_version"] == 1 and r["wall_ms"] is None for r in recs)
    validate(recs)


def test_different_seed_differs(tmp_path):
    _, a, _ = run(["distinguish", "--structure", "fbc-kf-4r", "--n", "6", "--trials", "3", "--seed", "1"], tmp_path, "a")
    _, b, _ = run(["distinguish", "--structure", "fbc-kf-4r", "--n", "6", "--trials", "3", "--seed", "2"], tmp_path, "b")
    assert a != b


def test_workers_preserve_order(tmp_path):
    base = ["distinguish", "--structure", "fbc-fk-6r", "--n", "5", "--trials", "6", "--seed", "3"]
    serial = tmp_path / "s.jsonl"
    parallel = tmp_path / "p.jsonl"
    assert cli.main([*base, "--workers", "1", "--out", str(serial)]) == 0
    assert cli.main([*base, "--workers", "3", "--out", str(parallel)]) == 0
    assert serial.read_text() == parallel.read_text()


def test_timing_flag_fills_wall_ms(tmp_path):
    _, _, recs = run(["distinguish", "--structure", "fbc-f-4r", "--n", "4", "--timing"], tmp_path)
    assert recs[0]["wall_ms"] >= 0


@pytest.mark.parametrize("argv", [
    ["distinguish", "--structure", "bogus"],
    ["distinguish"],
    ["attack", "nope"],
    ["distinguish", "--structure", "fbc-f-4r", "--trials", "0"],
    ["distinguish", "--structure", "fbc-f-4r", "--mode", "sideways"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2


def test_q1_impostor_is_usage_error(tmp_path):
    assert cli.main(["attack", "q1-fbckf-4r", "--mode", "impostor", "--out", str(tmp_path / "x")]) == 2


def test_guard_exit_3(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv(GUARD_ENV, raising=False)
    out = tmp_path / "g.jsonl"
    assert cli.main(["attack", "q2-fbcf", "--n", "8", "--r", "9", "--out", str(out)]) == 3
    assert not out.exists()
    assert "resource guard" in capsys.readouterr().err


def test_guard_env_override_passes_precheck(monkeypatch):
    from fbcq.experiments import ExperimentConfig, precheck
    monkeypatch.setenv(GUARD_ENV, "1")
    precheck("q2-fbcf", ExperimentConfig(n=8, r=9))
    monkeypatch.delenv(GUARD_ENV)
    precheck("q2-fbcf", ExperimentConfig(n=8, r=9, override_guard=True))


def test_attack_q1_and_schema(tmp_path):
    code, _, recs = run(["attack", "q1-fbckf-4r", "--n", "6", "--trials", "4", "--seed", "7"], tmp_path)
    assert code == 0
    assert all(r["planted_contained"]["all"] for r in recs)
    validate(recs)


def test_attack_gms(tmp_path):
    code, _, recs = run(["attack", "gms-fx", "--m", "6", "--n", "6", "--trials", "2", "--seed", "5"], tmp_path)
    assert code == 0
    assert all(r["planted_contained"] == {"k0": True, "k1": True, "k2": True, "all": True} for r in recs)
    validate(recs)


def test_attack_failure_exit_1(tmp_path):
    # zero round functions leave nothing periodic to find
    code, _, recs = run(["attack", "q2-fbcf", "--n", "3", "--r", "6", "--functions", "zero"], tmp_path)
    assert code == 1 and not recs[0]["success"]


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# lab settings\nstructure = fbc-kf-4r\nn = 5\ntrials = 3\nseed = 11\n")
    _, _, recs = run(["distinguish", "--config", str(cfg)], tmp_path, "a")
    assert len(recs) == 3 and recs[0]["structure"] == "fbc-kf-4r" and recs[0]["n"] == 5 and recs[0]["seed"] == 11
    _, _, recs = run(["distinguish", "--config", str(cfg), "--n", "4", "--trials", "2"], tmp_path, "b")
    assert len(recs) == 2 and recs[0]["n"] == 4 and recs[0]["seed"] == 11
    _, _, recs = run(["distinguish", "--structure", "fbc-f-4r"], tmp_path, "c")
    assert recs[0]["n"] == 8 and recs[0]["seed"] == 0


@pytest.mark.parametrize("text", ["bogus_key = 1\n", "no equals sign\n", "timing = maybe\n", "mode = sideways\n"])
def test_bad_config_is_usage_error(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    assert cli.main(["distinguish", "--structure", "fbc-f-4r", "--config", str(cfg)]) == 2


def test_selftest_json(capsys):
    assert cli.main(["selftest", "--json"]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    jsonschema.validate(summary, SCHEMAS["selftest"])
    assert summary["failed"] == 0 and summary["passed"] >= 9


def test_selftest_fault(capsys):
    assert cli.main(["selftest", "--inject-fault"]) == 1
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert "1 failed" in last and "fault.injected" in last


def test_schemas_are_valid_documents():
    for schema in SCHEMAS.values():
        jsonschema.Draft202012Validator.check_schema(schema)

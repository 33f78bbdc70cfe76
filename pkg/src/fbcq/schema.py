"""JSON Schemas for the JSONL records (schema_version 1)."""

from __future__ import annotations

COUNTERS = {
    "type": "object",
    "required": ["classical_queries", "superposition_query_units", "simulated_encryptions", "offline_evaluations"],
    "properties": {k: {"type": "integer", "minimum": 0} for k in
                   ("classical_queries", "superposition_query_units", "simulated_encryptions", "offline_evaluations")},
}

HEX = {"type": "string", "pattern": "^[0-9a-f]+$"}
HEX_OR_NULL = {"anyOf": [HEX, {"type": "null"}]}
WALL = {"anyOf": [{"type": "number", "minimum": 0}, {"type": "null"}]}

DISTINGUISH_RECORD = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "distinguisher trial",
    "type": "object",
    "required": ["schema_version", "kind", "structure", "mode", "n", "r", "seed", "trial", "verdict", "correct",
                 "period_hex", "simon_rounds", "degenerate_flag", "counters", "wall_ms"],
    "properties": {
        "schema_version": {"const": 1},
        "kind": {"const": "distinguish"},
        "structure": {"enum": ["fbc-f-4r", "fbc-kf-4r", "fbc-fk-6r"]},
        "mode": {"enum": ["genuine", "impostor"]},
        "n": {"type": "integer", "minimum": 2, "maximum": 16},
        "r": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "trial": {"type": "integer", "minimum": 0},
        "verdict": {"enum": ["CIPHER", "RANDOM"]},
        "correct": {"type": "boolean"},
        "period_hex": HEX_OR_NULL,
        "expected_period_hex": HEX_OR_NULL,
        "simon_rounds": {"type": "integer", "minimum": 0},
        "degenerate_flag": {"type": "boolean"},
        "redraws": {"type": "integer", "minimum": 0},
        "multiple_periods": {"type": "boolean"},
        "counters": COUNTERS,
        "wall_ms": WALL,
    },
}

ATTACK_RECORD = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "attack trial",
    "type": "object",
    "required": ["schema_version", "kind", "attack_id", "structure", "n", "r", "seed", "trial", "status", "success",
                 "recovered", "planted_contained", "counters", "search_evaluations", "chain_count", "wall_ms"],
    "properties": {
        "schema_version": {"const": 1},
        "kind": {"const": "attack"},
        "attack_id": {"enum": ["q2-fbcf", "q2-fbckf", "q2-fbcfk", "q1-feistel-kf-3r", "q1-fbckf-4r",
                               "q1-fbcfk-5r", "gms-fx"]},
        "structure": {"type": "string"},
        "mode": {"enum": ["genuine", "impostor"]},
        "n": {"type": "integer", "minimum": 2, "maximum": 16},
        "r": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "trial": {"type": "integer", "minimum": 0},
        "status": {"enum": ["verified", "ambiguous", "failed", "overflow", "survivors", "empty"]},
        "success": {"type": "boolean"},
        "recovered": {"type": "object", "additionalProperties": {"type": "array", "items": HEX}},
        "planted_contained": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "counters": COUNTERS,
        "search_evaluations": {"type": "integer", "minimum": 0},
        "grover_nominal_cost": {"type": "integer", "minimum": 0},
        "guessed_bits": {"anyOf": [{"type": "integer", "minimum": 0}, {"type": "null"}]},
        "chain_count": {"type": "integer", "minimum": 0},
        "survivor_count": {"type": "integer", "minimum": 0},
        "wrong_survivors": {"type": "integer", "minimum": 0},
        "trace": {"type": "array"},
        "notes": {"type": "object"},
        "wall_ms": WALL,
    },
}

SUMMARY_RECORD = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "selftest summary",
    "type": "object",
    "required": ["schema_version", "kind", "passed", "failed", "failures"],
    "properties": {
        "schema_version": {"const": 1},
        "kind": {"const": "selftest"},
        "passed": {"type": "integer", "minimum": 0},
        "failed": {"type": "integer", "minimum": 0},
        "failures": {"type": "array", "items": {"type": "string"}},
        "checks": {"type": "object"},
    },
}

SCHEMAS = {"distinguish": DISTINGUISH_RECORD, "attack": ATTACK_RECORD, "selftest": SUMMARY_RECORD}


def schema_for(record: dict) -> dict:
    return SCHEMAS[record["kind"]]

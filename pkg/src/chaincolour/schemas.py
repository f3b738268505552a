"""Published JSON Schemas for command payloads (draft 2020-12)."""
from __future__ import annotations

_COUNT = {"type": "string", "pattern": "^[0-9]+$"}
_SETS = {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 1}}}
_RATIONAL = {"type": "object", "required": ["num", "den"],
             "properties": {"num": {"type": "string", "pattern": "^-?[0-9]+$"},
                            "den": {"type": "string", "pattern": "^[1-9][0-9]*$"}}}
_FAMILY = {"type": "object", "required": ["n", "sets"],
           "properties": {"n": {"type": "integer", "minimum": 1}, "sets": _SETS}}
_CHECKS = {"type": "object", "additionalProperties": {
    "type": "object", "required": ["passed", "witness"], "properties": {"passed": {"type": "boolean"}}}}


def _obj(required: dict, optional: dict | None = None) -> dict:
    return {"type": "object", "required": sorted(required), "properties": {**required, **(optional or {})}}


ERROR = _obj({"error": {"type": "string"}, "message": {"type": "string"}})

PAYLOADS: dict[str, dict] = {
    "count": _obj({"count": _COUNT, "method": {"enum": ["antichain", "chain-free", "chain-bound", "layered",
                                                         "backtrack", "bruteforce"]},
                   "family_size": {"type": "integer"}, "log2": {"type": ["number", "null"]},
                   "minimal_set_bound": {"anyOf": [_COUNT, {"type": "null"}]}}),
    "validate": _obj({"valid": {"type": "boolean"}, "monochromatic_chain": {"anyOf": [_SETS, {"type": "null"}]}}),
    "cp": _obj({"comparable_pairs": {"type": "integer", "minimum": 0}, "family_size": {"type": "integer"}}),
    "kleitman": _obj({"family_size": {"type": "integer"}, "comparable_pairs": {"type": "integer"},
                      "required": {"type": "integer"}, "holds": {"type": "boolean"}}),
    "lym": _obj({"sum": _RATIONAL, "holds": {"type": "boolean"}}),
    "weight": _obj({"weight": _RATIONAL, "k": {"type": "integer"}},
                   {"supersaturation": _obj({"holds": {"type": "boolean"}, "hypothesis_met": {"type": "boolean"},
                                             "observed_pairs": {"type": "integer"}, "required_pairs": _RATIONAL,
                                             "r": _RATIONAL, "family_weight": _RATIONAL})}),
    "mirsky": _obj({"height": {"type": "integer", "minimum": 0},
                    "parts": {"type": "array", "items": _SETS}, "linear_extension": _SETS}),
    "partition": _obj({"n": {"type": "integer"}, "family_size": {"type": "integer"}, "stage": {"type": "string"},
                       "params": _obj({"k": {"type": "integer"}, "epsilon": {"type": "string"},
                                       "omega": {"type": "integer"}}),
                       "parts": _obj({kind: {"type": "object", "additionalProperties": _SETS} for kind in "AUDPR"}),
                       "retained": {"type": "integer"}, "qualities": _CHECKS, "properties": _CHECKS,
                       "ledger_checks": _CHECKS},
                      {"exact_count": _COUNT, "verified": {"type": "boolean"}}),
    "search": _obj({"n": {"type": "integer"}, "r": {"type": "integer"}, "k": {"type": "integer"},
                    "method": {"enum": ["exhaustive", "local"]}, "best": _COUNT,
                    "maximisers": {"type": "array", "items": _obj({"canonical": {"type": "string"}, "sets": _SETS})},
                    "partial": {"type": "boolean"}, "note": {"type": "string"}}),
    "construct": _obj({"kind": {"enum": ["middle", "paired", "levels"]}},
                      {"family": _FAMILY, "exact_count": _COUNT, "paired_distinct": _COUNT}),
    "report": _obj({"out": {"type": "string"}, "passed": {"type": "integer"}, "total": {"type": "integer"},
                    "criteria": {"type": "array"}}),
}


def payload_schema(command: str, failed: bool = False) -> dict:
    """Schema of the payload printed by ``command``; ``failed`` selects the error shape."""
    return ERROR if failed else PAYLOADS[command]


def envelope_schema(command: str) -> dict:
    return _obj({"command": {"const": command}, "parameters": {"type": "object"},
                 "payload": {"anyOf": [PAYLOADS[command], ERROR]},
                 "wall_time": {"type": "number", "minimum": 0}, "version": {"type": "string"}})

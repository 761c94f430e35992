"""JSON Schemas for CLI reports and a checker built on ``jsonschema``."""

from __future__ import annotations

from typing import Any

import jsonschema

_num = {"type": "number"}
_vec = {"type": "array", "items": _num}

_map = {
    "type": "object",
    "required": ["factors", "convention"],
    "properties": {
        "factors": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
        "convention": {
            "oneOf": [
                {"enum": ["row-major", "col-major"]},
                {"type": "object", "required": ["table"],
                 "properties": {"table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}}},
            ]
        },
    },
}

_ineq = {
    "type": "object",
    "required": ["lhs", "rhs", "holds", "slack"],
    "properties": {"lhs": _num, "rhs": _num, "holds": {"type": "boolean"}, "slack": _num},
}

_qsub = {
    "type": "object",
    "required": ["S12", "S1", "S2", "holds", "slack"],
    "properties": {"S12": _num, "S1": _num, "S2": _num, "holds": {"type": "boolean"}, "slack": _num},
}

_qssa = {
    "type": "object",
    "required": ["S123", "S12", "S23", "S2", "lhs", "rhs", "holds", "slack"],
    "properties": {k: _num for k in ("S123", "S12", "S23", "S2", "lhs", "rhs", "slack")} | {"holds": {"type": "boolean"}},
}

_factorization = {
    "type": "object",
    "required": ["success", "residual", "factors", "gauge"],
    "properties": {
        "success": {"type": "boolean"},
        "residual": {"type": "number", "minimum": 0},
        "factors": {"type": "array"},
        "gauge": {"const": "unit-norm-first-positive"},
    },
}

_error = {
    "type": "object",
    "required": ["command", "error"],
    "properties": {
        "command": {"type": "string"},
        "error": {"type": "object", "required": ["type", "message"]},
    },
}

SCHEMAS: dict[str, dict[str, Any]] = {
    "validate": {
        "type": "object",
        "required": ["command", "kind", "valid", "violations"],
        "properties": {
            "kind": {"enum": ["density-matrix", "state", "observable", "index-map"]},
            "valid": {"type": "boolean"},
            "violations": {"type": "array", "items": {"type": "object", "required": ["condition", "magnitude"]}},
        },
    },
    "analyze": {
        "type": "object",
        "required": ["command", "N", "entropy", "partitions"],
        "properties": {
            "N": {"type": "integer"},
            "entropy": _num,
            "note": {"type": "string"},
            "partitions": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["map", "marginals", "marginal_entropies"],
                    "properties": {
                        "map": _map,
                        "marginals": {"type": "array", "items": _vec},
                        "marginal_entropies": _vec,
                        "mutual_information": _num,
                        "subadditivity": _ineq,
                        "strong_subadditivity": _ineq,
                    },
                },
            },
        },
    },
    "hidden": {
        "type": "object",
        "required": ["command", "map", "mean", "factorization", "verdict"],
        "properties": {
            "map": _map,
            "mean": _num,
            "factorization": _factorization,
            "verdict": {"enum": ["product-form", "not product-form under this map"]},
            "lifted": {"type": "array", "items": _vec},
            "correlation": _num,
            "joint_correlation": _num,
            "difference": {"type": "number", "minimum": 0},
        },
    },
    "quantum": {
        "type": "object",
        "required": ["command", "map", "entropy"],
        "properties": {
            "map": _map,
            "entropy": _num,
            "trace_value": _num,
            "lifted_product_value": _num,
            "difference": {"type": "number", "minimum": 0},
            "commutators": {"type": "array", "items": {"type": "object", "required": ["pair", "max_abs"]}},
            "reduced_entropies": _vec,
            "subadditivity": _qsub,
            "strong_subadditivity": _qssa,
        },
    },
    "sample": {
        "type": "object",
        "required": ["command", "kind", "count", "empirical_mean", "empirical_moments", "exact_mean",
                     "standard_error_estimate", "seed", "algorithm"],
        "properties": {
            "count": {"type": "integer", "minimum": 1},
            "empirical_mean": _num,
            "empirical_moments": _vec,
            "exact_mean": _num,
            "standard_error_estimate": {"type": "number", "minimum": 0},
            "seed": {"type": "integer"},
            "algorithm": {"const": "splitmix64"},
        },
    },
}


def validate_report(report: dict[str, Any]) -> None:
    """Raise ``jsonschema.ValidationError`` unless ``report`` matches its command's schema."""
    if isinstance(report, dict) and "error" in report:
        jsonschema.validate(report, _error)
        return
    command = report.get("command") if isinstance(report, dict) else None
    if command not in SCHEMAS:
        raise jsonschema.ValidationError(f"unknown report command {command!r}")
    jsonschema.validate(report, SCHEMAS[command])

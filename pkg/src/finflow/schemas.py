"""JSON Schemas for CLI jobs.

A job is ``{"command": ..., "params": {...}, "budgets": {...}}``; the params
object is validated against the schema of its command before any work starts.
``dump_schemas`` writes the versioned copies kept under ``docs/schemas``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema

from .errors import ValidationError

SCHEMA_VERSION = 1

KINDS = ["set", "chain", "graph", "ordered-graph", "boolean", "ordered-boolean",
         "vector", "ordered-vector"]
FRAISSE_CLASSES = ["sets", "linear-orders", "graphs", "ordered-graphs", "boolean-algebras",
                   "natural-boolean-algebras", "vector-spaces-f2", "vector-spaces-f3",
                   "natural-vector-spaces-f2"]
ORDER_CLASSES = ["linear-orders", "ordered-graphs", "natural-ba", "natural-vs2", "natural-vs3"]
FLOW_KINDS = ["set", "boolean", "vector"]
COMMANDS = ["ramsey", "fraisse", "orders", "flow", "samuel", "amenable", "catalog"]

_size = {"type": "integer", "minimum": 0, "maximum": 64}
_prime = {"type": "integer", "enum": [2, 3, 5, 7]}
_group = {"type": "string", "minLength": 1}

PARAM_SCHEMAS: dict[str, dict[str, Any]] = {
    "ramsey": {
        "type": "object",
        "properties": {
            "kind": {"enum": KINDS},
            "c": _size, "b": _size, "a": _size,
            "k": {"type": "integer", "minimum": 1, "maximum": 8},
            "p": _prime,
            "bound": _size,
        },
        "required": ["kind", "b", "a", "k"],
        "anyOf": [{"required": ["c"]}, {"required": ["bound"]}],
        "additionalProperties": False,
    },
    "fraisse": {
        "type": "object",
        "properties": {
            "class": {"enum": FRAISSE_CLASSES},
            "bound": _size,
            "axiom": {"enum": ["HD", "JEP", "AP", "all"]},
        },
        "required": ["class"],
        "additionalProperties": False,
    },
    "orders": {
        "type": "object",
        "properties": {"class": {"enum": ORDER_CLASSES}, "bound": {"type": "integer", "minimum": 1, "maximum": 8}},
        "required": ["class", "bound"],
        "additionalProperties": False,
    },
    "flow": {
        "type": "object",
        "properties": {
            "kind": {"enum": FLOW_KINDS},
            "c": {"type": "integer", "minimum": 0, "maximum": 6},
            "p": _prime,
            "group": _group,
        },
        "oneOf": [{"required": ["kind", "c"]}, {"required": ["group"]}],
        "additionalProperties": False,
    },
    "samuel": {
        "type": "object",
        "properties": {"group": _group, "family": {"type": "integer", "minimum": 0}},
        "required": ["group"],
        "additionalProperties": False,
    },
    "amenable": {
        "type": "object",
        "properties": {"group": _group},
        "required": ["group"],
        "additionalProperties": False,
    },
    "catalog": {
        "type": "object",
        "properties": {"group": _group},
        "additionalProperties": False,
    },
}

JOB_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "finflow job",
    "version": SCHEMA_VERSION,
    "type": "object",
    "properties": {
        "command": {"enum": COMMANDS},
        "params": {"type": "object"},
        "budgets": {
            "type": "object",
            "properties": {
                "nodes": {"type": "integer", "minimum": 1},
                "secs": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "workers": {"type": "integer", "minimum": 1, "maximum": 64},
    },
    "required": ["command", "params"],
    "additionalProperties": False,
}


def validate_job(job: Any) -> None:
    try:
        jsonschema.validate(job, JOB_SCHEMA)
        jsonschema.validate(job["params"], PARAM_SCHEMAS[job["command"]])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"invalid job at {where}: {exc.message}") from None


def all_schemas() -> dict[str, dict[str, Any]]:
    out = {"job": JOB_SCHEMA}
    for cmd, schema in PARAM_SCHEMAS.items():
        out[f"params-{cmd}"] = {"title": f"finflow {cmd} params", "version": SCHEMA_VERSION, **schema}
    return out


def schema_text(schema: dict[str, Any]) -> str:
    return json.dumps(schema, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dump_schemas(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, schema in all_schemas().items():
        path = directory / f"{name}.v{SCHEMA_VERSION}.json"
        path.write_text(schema_text(schema))
        written.append(path)
    return written

"""JSON file formats and a lossless float serializer.

State:        {"probs": [...]}
Observable:   {"values": [...]}
Matrix:       {"dim": N, "entries": [[[re, im], ...], ...]}
Index map:    {"factors": [n1, ...], "convention": "row-major" | "col-major" | {"table": [[...], ...]}}

Reports are written with every float at 17 significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from qhc.classical import ClassicalObservable, ProbabilityState
from qhc.errors import DimensionError, ValidationError
from qhc.indexmap import IndexMap


class FormatError(ValueError):
    """A JSON document does not have the expected layout."""


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    if x == 0.0:
        return "0.0" if math.copysign(1.0, x) > 0 else "-0.0"
    text = format(x, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def dumps(obj: Any, indent: int | None = 2) -> str:
    """JSON text with floats at 17 significant digits."""

    def enc(o: Any, level: int) -> str:
        pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
        end = "" if indent is None else "\n" + " " * (indent * level)
        sep = "," if indent is None else ","
        colon = ":" if indent is None else ": "
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, np.ndarray):
            o = o.tolist()
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [pad + json.dumps(str(k)) + colon + enc(v, level + 1) for k, v in o.items()]
            return "{" + sep.join(items) + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[" + sep.join(pad + enc(v, level + 1) for v in o) + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0)


def load_json(path: str | Path) -> Any:
    """Read a JSON file; ``OSError`` and ``json.JSONDecodeError`` propagate."""
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def state_from_json(obj: dict) -> ProbabilityState:
    if not isinstance(obj, dict) or "probs" not in obj:
        raise FormatError('state document needs a "probs" array')
    return ProbabilityState(obj["probs"])


def state_to_json(state: ProbabilityState) -> dict:
    return {"probs": state.probs.tolist()}


def observable_from_json(obj: dict) -> ClassicalObservable:
    if not isinstance(obj, dict) or "values" not in obj:
        raise FormatError('observable document needs a "values" array')
    return ClassicalObservable(obj["values"])


def observable_to_json(obs: ClassicalObservable) -> dict:
    return {"values": obs.values.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Complex matrix from the ``{"dim", "entries"}`` layout; no validation of physics."""
    if not isinstance(obj, dict) or "entries" not in obj:
        raise FormatError('matrix document needs an "entries" array')
    rows = obj["entries"]
    try:
        arr = np.array([[complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z) for z in row]
                        for row in rows], dtype=complex)
    except (TypeError, IndexError, ValueError) as exc:
        raise FormatError(f"bad matrix entries: {exc}") from None
    dim = obj.get("dim", arr.shape[0] if arr.ndim == 2 else None)
    if arr.ndim != 2 or arr.shape != (dim, dim):
        raise DimensionError(f"entries of shape {arr.shape} do not match dim={dim}")
    return arr


def matrix_to_json(m) -> dict:
    m = np.asarray(getattr(m, "entries", m), dtype=complex)
    return {"dim": int(m.shape[0]), "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def map_from_json(obj: dict) -> IndexMap:
    if not isinstance(obj, dict) or "factors" not in obj:
        raise FormatError('index map document needs a "factors" array')
    try:
        return IndexMap.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad index map: {exc}") from None


def write_text(text: str, path: str | Path | None) -> None:
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")


__all__ = [
    "FormatError",
    "ValidationError",
    "dumps",
    "load_json",
    "map_from_json",
    "matrix_from_json",
    "matrix_to_json",
    "observable_from_json",
    "observable_to_json",
    "state_from_json",
    "state_to_json",
]

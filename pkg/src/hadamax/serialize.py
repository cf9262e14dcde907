"""JSON, text-grid and LaTeX serialization of symbolic and numeric matrices.

Symbolic JSON::

    {"n": 2, "params": ["a"], "scaleHalfLog": 0,
     "grid": [[{"coeffs": {}, "quarter": 0}, {"coeffs": {"a": 1}, "quarter": 2}], ...]}

``null`` marks a zero entry.  Numeric JSON is ``{"n": 2, "entries": [[[re, im], ...], ...]}``.
"""

from __future__ import annotations

import json
import math
from typing import Union

import jsonschema
import numpy as np

from .algebra import PhaseLinearForm, SymbolicMatrix, format_entry, parse_entry

__all__ = [
    "SchemaError",
    "SYMBOLIC_SCHEMA",
    "NUMERIC_SCHEMA",
    "to_json",
    "from_json",
    "import_matrix",
    "to_grid",
    "parse_grid",
    "to_latex",
    "format_number",
]

_ENTRY = {
    "oneOf": [
        {"type": "null"},
        {
            "type": "object",
            "properties": {
                "coeffs": {"type": "object", "additionalProperties": {"type": "integer"}},
                "quarter": {"type": "integer", "minimum": 0, "maximum": 3},
            },
            "required": ["coeffs", "quarter"],
            "additionalProperties": False,
        },
    ]
}

SYMBOLIC_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "params": {"type": "array", "items": {"type": "string"}},
        "scaleHalfLog": {"type": "integer"},
        "grid": {"type": "array", "items": {"type": "array", "items": _ENTRY}},
    },
    "required": ["n", "params", "scaleHalfLog", "grid"],
    "additionalProperties": False,
}

NUMERIC_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
    },
    "required": ["n", "entries"],
    "additionalProperties": False,
}


class SchemaError(ValueError):
    """Invalid matrix document; ``path`` locates the field, ``line``/``column`` a parse error."""

    def __init__(self, message: str, path: str = "", line: int = None, column: int = None):
        self.path, self.line, self.column = path, line, column
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(f"at {path}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)


def _entry_json(e):
    if e is None:
        return None
    return {"coeffs": dict(e.coeffs), "quarter": e.quarter}


def to_json(M: Union[SymbolicMatrix, np.ndarray], indent: int = None) -> str:
    if isinstance(M, SymbolicMatrix):
        doc = {
            "n": M.n,
            "params": list(M.params),
            "scaleHalfLog": M.scale_half_log,
            "grid": [[_entry_json(e) for e in row] for row in M.grid],
        }
    else:
        M = np.asarray(M, dtype=complex)
        if not np.all(np.isfinite(M)):
            raise ValueError("numeric matrices must have finite entries")
        doc = {"n": M.shape[0], "entries": [[[float(z.real), float(z.imag)] for z in row] for row in M]}
    return json.dumps(doc, indent=indent)


def _path(err: jsonschema.ValidationError) -> str:
    out = "$"
    for p in err.absolute_path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _check_shape(rows, n: int, field: str):
    if len(rows) != n:
        raise SchemaError(f"expected {n} rows, found {len(rows)}", f"$.{field}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise SchemaError(f"expected {n} entries, found {len(row)}", f"$.{field}[{i}]")


def from_json(text: str) -> Union[SymbolicMatrix, np.ndarray]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", "$")
    schema = NUMERIC_SCHEMA if "entries" in doc else SYMBOLIC_SCHEMA
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc),
                    key=lambda e: (len(list(e.absolute_path)), list(map(str, e.absolute_path))))
    if errors:
        err = max(errors, key=lambda e: len(list(e.absolute_path)))
        if err.validator == "oneOf" and err.context:
            err = max(err.context, key=lambda e: len(list(e.absolute_path)))
        raise SchemaError(err.message, _path(err))
    n = doc["n"]
    if schema is NUMERIC_SCHEMA:
        _check_shape(doc["entries"], n, "entries")
        return np.array([[complex(re, im) for re, im in row] for row in doc["entries"]])
    _check_shape(doc["grid"], n, "grid")
    grid = [[None if e is None else PhaseLinearForm(e["coeffs"], e["quarter"]) for e in row]
            for row in doc["grid"]]
    try:
        return SymbolicMatrix(grid, tuple(doc["params"]), doc["scaleHalfLog"])
    except (ValueError, TypeError) as exc:
        raise SchemaError(str(exc), "$.params") from None


def import_matrix(path) -> Union[SymbolicMatrix, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())


def format_number(z: complex, digits: int = 12) -> str:
    """``1``, ``-i`` etc. for exact quarter-turn values, otherwise ``re+imi``."""
    z = complex(z)
    for val, tok in ((1, "1"), (-1, "-1"), (1j, "i"), (-1j, "-i"), (0, "0")):
        if abs(z - val) < 1e-12:
            return tok
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"


def to_grid(M: Union[SymbolicMatrix, np.ndarray]) -> str:
    """Whitespace-aligned rows of entry tokens."""
    if isinstance(M, SymbolicMatrix):
        return str(M)
    cells = [[format_number(z) for z in row] for row in np.asarray(M)]
    width = max(len(c) for row in cells for c in row)
    return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


def parse_grid(text: str, params=None, scale_half_log: int = 0) -> SymbolicMatrix:
    rows = [line.split() for line in text.strip().splitlines() if line.strip()]
    return SymbolicMatrix([[parse_entry(t) for t in row] for row in rows], params, scale_half_log)


def _latex_token(tok: str) -> str:
    for lead in ("-i", "i"):
        if tok.startswith(lead + "e"):
            return f"{lead}\\,{tok[len(lead):]}"
    return tok


def to_latex(M: Union[SymbolicMatrix, np.ndarray]) -> str:
    if isinstance(M, SymbolicMatrix):
        cells = [[_latex_token(format_entry(e)) for e in row] for row in M.grid]
    else:
        cells = [[format_number(z) for z in row] for row in np.asarray(M)]
    n = len(cells)
    body = " \\\\\n".join(" & ".join(row) for row in cells)
    return f"\\left[\\begin{{array}}{{{'r' * n}}}\n{body}\n\\end{{array}}\\right]"

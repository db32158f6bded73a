"""JSON model documents: schemas, loading with line-anchored errors, serialization.

A document is a JSON object whose ``type`` is one of ``lattice``,
``photonic``, ``schrodinger``, ``interface_lattice`` or ``glued_continuum``.
The README describes each schema with an example; ``models/`` holds ready-made documents.
"""

import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .continuum import PeriodicMedium
from .errors import ModelError
from .lattice import HoppingModel
from .lattice_interface import InterfaceSpec

__all__ = [
    "DocumentError",
    "SCHEMA",
    "GluedSpec",
    "load_document",
    "parse_document",
    "to_document",
    "dump_document",
]

_MATRIX = {
    "type": "array",
    "minItems": 2,
    "maxItems": 2,
    "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
}
_ROW = {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}

_LATTICE = {
    "type": "object",
    "required": ["r", "A", "V"],
    "properties": {
        "type": {"const": "lattice"},
        "r": {"type": "integer", "minimum": 1},
        "A": {"type": "array", "minItems": 1, "items": _MATRIX},
        "V": _MATRIX,
        "Q": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}},
    },
    "additionalProperties": False,
}

_PHOTONIC_PIECE = {
    "type": "object",
    "required": ["length", "eps", "mu"],
    "properties": {
        "length": {"type": "number", "exclusiveMinimum": 0},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "mu": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}
_SCHRODINGER_PIECE = {
    "type": "object",
    "required": ["length", "V"],
    "properties": {"length": {"type": "number", "exclusiveMinimum": 0}, "V": {"type": "number"}},
    "additionalProperties": False,
}


def _medium_schema(kind, piece):
    return {
        "type": "object",
        "required": ["pieces"],
        "properties": {
            "type": {"const": kind},
            "pieces": {"type": "array", "minItems": 1, "items": piece},
        },
        "additionalProperties": False,
    }


_PHOTONIC = _medium_schema("photonic", _PHOTONIC_PIECE)
_SCHRODINGER = _medium_schema("schrodinger", _SCHRODINGER_PIECE)
_MEDIUM = {"oneOf": [_PHOTONIC, _SCHRODINGER], "required": ["type"]}

_INTERFACE = {
    "type": "object",
    "required": ["B_L", "B_R", "W"],
    "properties": {
        "type": {"const": "interface_lattice"},
        "dislocation": {"type": "boolean"},
        "bulk": dict(_LATTICE, required=["r", "A", "V"]),
        "left": _LATTICE,
        "right": _LATTICE,
        "B_L": _ROW,
        "B_R": _ROW,
        "W": {"type": "number"},
    },
    "additionalProperties": False,
    "oneOf": [
        {"required": ["dislocation", "bulk"], "properties": {"dislocation": {"const": True}}, "not": {"anyOf": [{"required": ["left"]}, {"required": ["right"]}]}},
        {"required": ["left", "right"], "not": {"anyOf": [{"required": ["bulk"]}, {"properties": {"dislocation": {"const": True}}, "required": ["dislocation"]}]}},
    ],
}

_GLUED = {
    "type": "object",
    "properties": {
        "type": {"const": "glued_continuum"},
        "dislocation": {"type": "boolean"},
        "medium": _MEDIUM,
        "left": _MEDIUM,
        "right": _MEDIUM,
        "gap_left": {"type": "integer", "minimum": 1},
        "gap_right": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
    "oneOf": [
        {"required": ["dislocation", "medium"], "properties": {"dislocation": {"const": True}}, "not": {"anyOf": [{"required": ["left"]}, {"required": ["right"]}]}},
        {"required": ["left", "right"], "not": {"anyOf": [{"required": ["medium"]}, {"properties": {"dislocation": {"const": True}}, "required": ["dislocation"]}]}},
    ],
}

SCHEMA = {
    "lattice": _LATTICE,
    "photonic": _PHOTONIC,
    "schrodinger": _SCHRODINGER,
    "interface_lattice": _INTERFACE,
    "glued_continuum": _GLUED,
}


class DocumentError(ModelError):
    """A document failed schema or model validation; ``line`` is 1-based or None."""

    def __init__(self, message, path=(), line=None):
        self.path = tuple(path)
        self.line = line
        where = "/".join(str(p) for p in self.path) or "<document>"
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{where}: {message}")


@dataclass(frozen=True, eq=False)
class GluedSpec:
    left: PeriodicMedium
    right: PeriodicMedium
    gap_left: int = 1
    gap_right: int = 1
    dislocation: bool = False


# --- locating a JSON path in the source text -------------------------------

_DECODER = json.JSONDecoder()
_WS = " \t\n\r"


def _skip(text, pos):
    while pos < len(text) and text[pos] in _WS:
        pos += 1
    return pos


def _offset(text, path):
    """Character offset where the value at ``path`` starts (best effort)."""
    pos = _skip(text, 0)
    for key in path:
        pos = _skip(text, pos)
        if pos >= len(text):
            return None
        opener = text[pos]
        pos += 1
        index = 0
        while True:
            pos = _skip(text, pos)
            if pos >= len(text) or text[pos] in "}]":
                return None
            if opener == "{":
                name, pos = json.decoder.scanstring(text, pos + 1)
                pos = _skip(text, pos) + 1  # the colon
                pos = _skip(text, pos)
                hit = name == key
            elif opener == "[":
                hit = index == key
            else:
                return None
            if hit:
                break
            _, pos = _DECODER.raw_decode(text, pos)
            pos = _skip(text, pos)
            if text[pos] == ",":
                pos += 1
            index += 1
    return pos


def _line_of(text, path):
    if text is None:
        return None
    try:
        pos = _offset(text, list(path))
    except (ValueError, IndexError):
        return None
    if pos is None:
        return None
    return text.count("\n", 0, pos) + 1


# --- building models ---------------------------------------------------------


def _axis_to_q(axis):
    n1, n3 = axis
    return np.array([[n3, n1], [n1, -n3]], dtype=float)


def _build(text, path, factory):
    try:
        return factory()
    except DocumentError:
        raise
    except (ModelError, ValueError) as exc:
        raise DocumentError(str(exc), path, _line_of(text, path)) from exc


def _lattice(doc, text, path):
    if len(doc["A"]) != doc["r"]:
        p = (*path, "A")
        raise DocumentError(f"r = {doc['r']} but {len(doc['A'])} hopping matrices given", p, _line_of(text, p))
    q = _axis_to_q(doc.get("Q", [1.0, 0.0]))
    return _build(text, path, lambda: HoppingModel([np.array(a) for a in doc["A"]], np.array(doc["V"]), q))


def _medium(doc, text, path):
    kind = doc["type"]
    if kind == "photonic":
        pieces = [(p["length"], p["eps"], p["mu"]) for p in doc["pieces"]]
    else:
        pieces = [(p["length"], p["V"]) for p in doc["pieces"]]
    return _build(text, (*path, "pieces"), lambda: PeriodicMedium(kind, pieces))


def _validate(doc, text):
    if not isinstance(doc, dict):
        raise DocumentError("top level must be a JSON object", (), 1)
    kind = doc.get("type")
    if kind not in SCHEMA:
        raise DocumentError(f"'type' must be one of {sorted(SCHEMA)}, got {kind!r}", ("type",), _line_of(text, ("type",)))
    validator = jsonschema.Draft202012Validator(SCHEMA[kind])
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        path = tuple(err.absolute_path)
        raise DocumentError(err.message, path, _line_of(text, path))
    return kind


def parse_document(doc, text=None):
    """Validate a decoded document and build its model object."""
    kind = _validate(doc, text)
    if kind == "lattice":
        return _lattice(doc, text, ())
    if kind in ("photonic", "schrodinger"):
        return _medium(doc, text, ())
    if kind == "interface_lattice":
        if doc.get("dislocation"):
            left = right = _lattice(doc["bulk"], text, ("bulk",))
        else:
            left = _lattice(doc["left"], text, ("left",))
            right = _lattice(doc["right"], text, ("right",))
        return _build(text, (), lambda: InterfaceSpec(left, right, doc["B_L"], doc["B_R"], doc["W"]))
    from .glued import dislocate

    if doc.get("dislocation"):
        left = _medium(doc["medium"], text, ("medium",))
        right = dislocate(left)
    else:
        left = _medium(doc["left"], text, ("left",))
        right = _medium(doc["right"], text, ("right",))
        if left.kind != right.kind:
            raise DocumentError("left and right media must be of the same kind", ("right",), _line_of(text, ("right", "type")))
    return GluedSpec(left, right, doc.get("gap_left", 1), doc.get("gap_right", 1), bool(doc.get("dislocation", False)))


def load_document(path):
    """Read, validate and build the model in a JSON document file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", (), exc.lineno) from exc
    return parse_document(doc, text)


# --- serialization ------------------------------------------------------------


def _lattice_doc(model, with_type=True):
    out = {"type": "lattice"} if with_type else {}
    out["r"] = model.range
    out["A"] = [a.tolist() for a in model.hoppings]
    out["V"] = model.onsite.tolist()
    out["Q"] = [float(model.q[0, 1]), float(model.q[0, 0])]
    return out


def _medium_doc(medium):
    if medium.kind == "photonic":
        pieces = [{"length": p[0], "eps": p[1], "mu": p[2]} for p in medium.pieces]
    else:
        pieces = [{"length": p[0], "V": p[1]} for p in medium.pieces]
    return {"type": medium.kind, "pieces": pieces}


def to_document(obj):
    """Canonical JSON-ready dict for any model object ``parse_document`` returns."""
    if isinstance(obj, HoppingModel):
        return _lattice_doc(obj)
    if isinstance(obj, PeriodicMedium):
        return _medium_doc(obj)
    if isinstance(obj, InterfaceSpec):
        out = {"type": "interface_lattice"}
        if obj.left is obj.right:
            out["dislocation"] = True
            out["bulk"] = _lattice_doc(obj.left, with_type=False)
        else:
            out["left"] = _lattice_doc(obj.left, with_type=False)
            out["right"] = _lattice_doc(obj.right, with_type=False)
        out["B_L"] = obj.b_left.tolist()
        out["B_R"] = obj.b_right.tolist()
        out["W"] = obj.w
        return out
    if isinstance(obj, GluedSpec):
        out = {"type": "glued_continuum"}
        if obj.dislocation:
            out["dislocation"] = True
            out["medium"] = _medium_doc(obj.left)
        else:
            out["left"] = _medium_doc(obj.left)
            out["right"] = _medium_doc(obj.right)
        out["gap_left"] = obj.gap_left
        out["gap_right"] = obj.gap_right
        return out
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_document(obj):
    return json.dumps(to_document(obj), indent=2) + "\n"

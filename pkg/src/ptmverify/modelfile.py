"""JSON model files.

::

    {"kind": "ontic",
     "prep_settings": ["0", "30"], "meas_settings": ["0", "-30"],
     "prep_outputs": ["up", "down"], "meas_outputs": ["up", "down"],
     "lambda": ["(0,up)", ...],
     "entries": [{"x": "0", "y": "0", "a": "up", "b": "down", "lambda": "(0,up)", "p": "1/2"}, ...]}

Probabilities are strings, either ``"n/d"`` or a decimal with at most six
fractional digits; both parse exactly. Cells not listed are zero.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .models import OnticModel, OperationalModel
from .prob import StructuralError, format_fraction, to_fraction

MAX_DECIMALS = 6
_ALPHABETS = ("prep_settings", "meas_settings", "prep_outputs", "meas_outputs")
_TOP_KEYS = {"kind", "name", "lambda", "entries", *_ALPHABETS}


class ModelFileError(ValueError):
    """Malformed model file; the message says where."""


def _labels(doc: dict, key: str) -> tuple[str, ...]:
    value = doc.get(key)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ModelFileError(f"{key}: expected a list of string labels")
    if len(set(value)) != len(value):
        raise ModelFileError(f"{key}: duplicate labels")
    return tuple(value)


def loads(text: str, source: str = "<string>") -> OperationalModel | OnticModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFileError(f"{source}: line {err.lineno}, column {err.colno}: {err.msg}") from None
    if not isinstance(doc, dict):
        raise ModelFileError(f"{source}: top level must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ModelFileError(f"{source}: unknown keys {sorted(unknown)}")
    kind = doc.get("kind")
    if kind not in ("operational", "ontic"):
        raise ModelFileError(f"{source}: kind: expected 'operational' or 'ontic', got {kind!r}")
    try:
        X, Y, A, B = (_labels(doc, k) for k in _ALPHABETS)
        L = _labels(doc, "lambda") if kind == "ontic" else None
    except ModelFileError as err:
        raise ModelFileError(f"{source}: {err}") from None
    if kind == "operational" and "lambda" in doc:
        raise ModelFileError(f"{source}: lambda: only ontic models have an ontic space")
    entries_doc = doc.get("entries")
    if not isinstance(entries_doc, list):
        raise ModelFileError(f"{source}: entries: expected a list")

    fields = ("x", "y", "a", "b") + (("lambda",) if L is not None else ())
    alphabets = dict(zip(fields, (X, Y, A, B, L)))
    entries: dict[tuple[str, ...], Any] = {}
    for i, item in enumerate(entries_doc):
        where = f"{source}: entries[{i}]"
        if not isinstance(item, dict):
            raise ModelFileError(f"{where}: expected an object")
        extra = set(item) - set(fields) - {"p"}
        if extra:
            raise ModelFileError(f"{where}: unknown keys {sorted(extra)}")
        key = []
        for name in fields:
            label = item.get(name)
            if label not in alphabets[name]:
                raise ModelFileError(f"{where}.{name}: {label!r} is not a declared label")
            key.append(label)
        raw = item.get("p")
        if not isinstance(raw, str):
            raise ModelFileError(f"{where}.p: probabilities must be strings such as '1/4' or '0.25'")
        try:
            p = to_fraction(raw, max_decimals=MAX_DECIMALS)
        except (ValueError, TypeError, ZeroDivisionError) as err:
            raise ModelFileError(f"{where}.p: {err}") from None
        if tuple(key) in entries:
            raise ModelFileError(f"{where}: duplicate cell {dict(zip(fields, key))}")
        entries[tuple(key)] = p
    try:
        if L is None:
            return OperationalModel.from_entries(X, Y, A, B, entries)
        return OnticModel.from_entries(X, Y, A, B, L, entries)
    except StructuralError as err:
        raise ModelFileError(f"{source}: {err}") from None


def load(path: str | Path) -> OperationalModel | OnticModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ModelFileError(f"{path}: {err.strerror}") from None
    return loads(text, str(path))


def to_document(model: OperationalModel | OnticModel, name: str | None = None) -> dict[str, Any]:
    ontic = isinstance(model, OnticModel)
    doc: dict[str, Any] = {"kind": "ontic" if ontic else "operational"}
    if name:
        doc["name"] = name
    for key in _ALPHABETS:
        doc[key] = list(getattr(model, key))
    if ontic:
        doc["lambda"] = list(model.lambda_space)
    fields = ("x", "y", "a", "b") + (("lambda",) if ontic else ())
    doc["entries"] = [
        {**{f: s[f] for f in fields}, "p": format_fraction(p)}
        for s, p in model.joint.items()
        if p != 0
    ]
    return doc


def dumps(model: OperationalModel | OnticModel, name: str | None = None) -> str:
    return json.dumps(to_document(model, name), indent=2, ensure_ascii=False) + "\n"


def dump(model: OperationalModel | OnticModel, path: str | Path, name: str | None = None) -> None:
    Path(path).write_text(dumps(model, name), encoding="utf-8")


def load_settings(path: str | Path) -> dict[str, dict[str, Any]]:
    """Settings distribution file: ``{"x": {"0": "1/2", ...}, "y": {...}}``; missing wings are uniform."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as err:
        raise ModelFileError(f"{path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ModelFileError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from None
    if not isinstance(doc, dict) or set(doc) - {"x", "y"}:
        raise ModelFileError(f"{path}: expected an object with keys 'x' and/or 'y'")
    out = {}
    for wing, dist in doc.items():
        if not isinstance(dist, dict):
            raise ModelFileError(f"{path}: {wing}: expected an object of label -> probability")
        try:
            out[wing] = {k: to_fraction(v, max_decimals=MAX_DECIMALS) for k, v in dist.items()}
        except (ValueError, TypeError) as err:
            raise ModelFileError(f"{path}: {wing}: {err}") from None
    return out

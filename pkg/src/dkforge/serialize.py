"""Canonical JSON documents: parsing with validation, serialization, hashing."""

from __future__ import annotations

import hashlib
import json

from .chain import ChainComplex, ChainMap, ComplexError, complex_from_json, complex_to_json, map_from_json, map_to_json
from .linalg import Ring, dumps, matrix_from_json, matrix_to_json
from .simplicial import (
    SimplicialError,
    SimplicialModule,
    check_simplicial_identities,
    module_from_json,
    module_to_json,
)


class DocumentError(ValueError):
    """A document that is not valid JSON, violates the schema, or fails validation."""


def canonical_dumps(doc) -> str:
    return dumps(doc)


def content_hash(doc) -> str:
    return "sha256:" + hashlib.sha256(canonical_dumps(doc).encode("utf-8")).hexdigest()


def document_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise DocumentError("top-level JSON value must be an object")
    if "presentation" in doc:
        return "module"
    if "components" in doc and "source" in doc:
        return "map"
    if "degrees" in doc:
        return "complex"
    if "entries" in doc and "rows" in doc:
        return "matrix"
    raise DocumentError("unrecognized document: expected a complex, map, module or matrix")


def parse_document(doc, expect: str | None = None):
    """Validate and build the value a JSON document describes; returns ``(kind, value)``."""
    kind = document_kind(doc)
    if expect is not None and kind != expect:
        raise DocumentError(f"expected a {expect} document, got a {kind}")
    try:
        if kind == "complex":
            return kind, complex_from_json(doc)
        if kind == "map":
            return kind, map_from_json(doc)
        if kind == "matrix":
            return kind, matrix_from_json(doc)
        A = module_from_json(doc)
        if doc.get("presentation") == "levelwise":
            problems = check_simplicial_identities(A)
            if problems:
                raise DocumentError(f"simplicial identity violated: {problems[0]}")
        return kind, A
    except (ComplexError, SimplicialError) as exc:
        raise DocumentError(str(exc)) from None
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(f"schema violation: {exc}") from None


def serialize(value) -> dict:
    if isinstance(value, ChainComplex):
        return complex_to_json(value)
    if isinstance(value, ChainMap):
        return map_to_json(value)
    if isinstance(value, SimplicialModule):
        return module_to_json(value)
    if isinstance(value, tuple) and len(value) == 2 and isinstance(value[1], Ring):
        return matrix_to_json(value[0], value[1])
    raise TypeError(f"cannot serialize {type(value).__name__}")


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None


def read_document(path: str, expect: str | None = None):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = loads(fh.read())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    return doc, parse_document(doc, expect)[1]

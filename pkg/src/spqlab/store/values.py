"""Term comparison for FILTER and ORDER BY."""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from typing import Optional

from ..rdf import BNODE, IRI, LITERAL, XSD, Term

NUMERIC_TYPES = {XSD + t for t in (
    "integer", "decimal", "double", "float", "int", "long", "short", "byte",
    "nonNegativeInteger", "nonPositiveInteger", "positiveInteger", "negativeInteger",
    "unsignedInt", "unsignedLong", "unsignedShort", "unsignedByte")}
STRING_TYPES = {None, XSD + "string"}


def numeric_value(t: Term) -> Optional[Decimal]:
    if t.kind != LITERAL or t.datatype not in NUMERIC_TYPES:
        return None
    try:
        v = Decimal(t.lexical.strip())
    except InvalidOperation:
        return None
    return v if v.is_finite() else None


def order_key(t: Optional[Term]) -> tuple:
    """Total order: unbound, blank nodes, IRIs, numeric literals, other literals."""
    if t is None:
        return (0,)
    if t.kind == BNODE:
        return (1, t.lexical)
    if t.kind == IRI:
        return (2, t.lexical)
    n = numeric_value(t)
    if n is not None:
        return (3, n, t.lexical, t.datatype or "")
    return (4, t.lexical, t.datatype or "", t.language or "")


def compare(op: str, a: Optional[Term], b: Optional[Term]) -> Optional[bool]:
    """Three-valued comparison; ``None`` is a type error (the filter drops the row)."""
    if a is None or b is None:
        return None
    na, nb = numeric_value(a), numeric_value(b)
    if na is not None and nb is not None:
        x, y = na, nb
    elif a.kind == LITERAL and b.kind == LITERAL and a.language is None and b.language is None \
            and a.datatype in STRING_TYPES and b.datatype in STRING_TYPES:
        x, y = a.lexical, b.lexical
    elif op in ("=", "!="):
        same = a == b
        return same if op == "=" else not same
    elif a.kind == LITERAL and b.kind == LITERAL and a.datatype == b.datatype and a.language == b.language:
        x, y = a.lexical, b.lexical
    else:
        return None
    if op == "=":
        return x == y
    if op == "!=":
        return x != y
    if op == "<":
        return x < y
    if op == ">":
        return x > y
    if op == "<=":
        return x <= y
    if op == ">=":
        return x >= y
    raise ValueError(f"unknown comparison {op!r}")

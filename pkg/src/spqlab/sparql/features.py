"""Feature extraction and the HP-Plausible / HP-Dubious split."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..rdf import LITERAL, Term
from .ast import (
    INVERSE,
    LINK,
    Compare,
    BoolOp,
    Not,
    OptionalPattern,
    PathPattern,
    QueryForm,
    TriplePattern,
    UnionPattern,
    Var,
    iter_atoms,
    iter_filters,
    walk,
)

FEATURES = ("SM", "BMM", "P1", "GP", "AG", "OPT", "U", "APP", "MO")
PLAUSIBLE_FEATURES = frozenset({"SM", "BMM", "P1"})


class PerformanceClass(str, Enum):
    HP_PLAUSIBLE = "HP-Plausible"
    HP_DUBIOUS = "HP-Dubious"


@dataclass(frozen=True)
class Classification:
    features: frozenset
    performance: PerformanceClass
    triggers: tuple[str, ...]

    @property
    def label(self) -> str:
        return self.performance.value

    def feature_string(self) -> str:
        return "+".join(f for f in FEATURES if f in self.features)


def _as_pattern(atom):
    """Length-one atoms reduce to triple patterns; inverse links swap ends."""
    if isinstance(atom, TriplePattern):
        return atom
    path = atom.path
    if path.kind == LINK:
        return TriplePattern(atom.s, path.iri, atom.o)
    if path.kind == INVERSE and path.args[0].kind == LINK:
        return TriplePattern(atom.o, path.args[0].iri, atom.s)
    return None


def _has_lang(node) -> bool:
    return isinstance(node, Term) and node.kind == LITERAL and node.language is not None


def _expr_terms(e):
    if isinstance(e, Compare):
        yield e.left
        yield e.right
    elif isinstance(e, BoolOp):
        for a in e.args:
            yield from _expr_terms(a)
    elif isinstance(e, Not):
        yield from _expr_terms(e.arg)


def bounded_patterns(patterns: list[TriplePattern]) -> list[bool]:
    """Constant predicate plus a constant end, directly or through shared variables."""
    flags = [False] * len(patterns)
    anchored: set[Var] = set()
    changed = True
    while changed:
        changed = False
        for i, tp in enumerate(patterns):
            if flags[i] or isinstance(tp.p, Var):
                continue
            ends = (tp.s, tp.o)
            if any(not isinstance(x, Var) or x in anchored for x in ends):
                flags[i] = True
                anchored.update(x for x in ends if isinstance(x, Var))
                changed = True
    return flags


def component_count(patterns: list[TriplePattern]) -> int:
    """Connected components of the pattern graph; nodes are subject/object terms."""
    parent = list(range(len(patterns)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict = {}
    for i, tp in enumerate(patterns):
        for node in (tp.s, tp.o):
            if node in owner:
                parent[find(i)] = find(owner[node])
            else:
                owner[node] = i
    return len({find(i) for i in range(len(patterns))})


def extract_features(q: QueryForm) -> frozenset:
    feats: set[str] = set()
    patterns: list[TriplePattern] = []
    for atom in iter_atoms(q.where):
        tp = _as_pattern(atom)
        if tp is None:
            feats.add("APP")
            continue
        if isinstance(atom, PathPattern) and atom.path.kind == INVERSE:
            feats.add("P1")
        patterns.append(tp)

    lang = any(_has_lang(x) for tp in patterns for x in (tp.s, tp.o))
    lang = lang or any(_has_lang(x) for e in iter_filters(q.where) for x in _expr_terms(e))

    if patterns:
        variable_pred = any(isinstance(tp.p, Var) for tp in patterns)
        if variable_pred or lang:
            feats.add("GP")
        elif len(patterns) == 1:
            feats.add("SM")
        elif all(bounded_patterns(patterns)) and component_count(patterns) == 1:
            feats.add("BMM")
        else:
            feats.add("GP")

    for node in walk(q.where):
        if isinstance(node, OptionalPattern):
            feats.add("OPT")
        elif isinstance(node, UnionPattern):
            feats.add("U")
    if q.has_aggregate:
        feats.add("AG")
    if q.order_by or q.limit is not None or q.offset is not None or q.distinct:
        feats.add("MO")
    return frozenset(feats)


def classify(features) -> Classification:
    features = frozenset(features)
    if not features:
        raise ValueError("empty feature set")
    unknown = features - set(FEATURES)
    if unknown:
        raise ValueError(f"unknown features: {sorted(unknown)}")
    triggers = tuple(f for f in FEATURES if f in features and f not in PLAUSIBLE_FEATURES)
    perf = PerformanceClass.HP_DUBIOUS if triggers else PerformanceClass.HP_PLAUSIBLE
    return Classification(features, perf, triggers)


def classify_query(q: QueryForm) -> Classification:
    return classify(extract_features(q))

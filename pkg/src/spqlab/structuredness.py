"""Extensional type systems and the coverage/coherence structuredness metric.

For a type T with property set P(T) and instance set I(T), coverage is the
fraction of (instance, property) slots that are actually set::

    CV(T) = sum_p OC(p, T) / (|P(T)| * |I(T)|)

and the dataset coherence is the weighted mean of coverages with weights
proportional to |P(T)| + |I(T)|.  All arithmetic is done on ``Fraction``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from .rdf import RDF_TYPE, Dataset, Term, iri


class EmptyTypeSystem(ValueError):
    """Raised when coherence is requested for a dataset without typed instances."""


@dataclass(frozen=True)
class DatasetStats:
    subjects: int
    predicates: int
    objects: int
    triples: int


def dataset_stats(dataset: Union[Dataset, Iterable[tuple[int, int, int]]]) -> DatasetStats:
    triples = dataset.triples if isinstance(dataset, Dataset) else list(dataset)
    s, p, o = set(), set(), set()
    for t in triples:
        s.add(t[0])
        p.add(t[1])
        o.add(t[2])
    return DatasetStats(len(s), len(p), len(o), len(triples))


@dataclass(frozen=True)
class TypeSystem:
    types: tuple[int, ...]
    properties: dict[int, frozenset[int]]
    instances: dict[int, frozenset[int]]
    occurrences: dict[tuple[int, int], int]
    type_predicate: Optional[int]
    stats: DatasetStats = field(default=DatasetStats(0, 0, 0, 0))

    @property
    def is_empty(self) -> bool:
        return not self.types

    def oc(self, prop: int, typ: int) -> int:
        return self.occurrences.get((typ, prop), 0)


def resolve_type_predicate(dataset: Dataset, type_predicate: Union[Term, str, None]) -> Optional[int]:
    if type_predicate is None:
        type_predicate = RDF_TYPE
    if isinstance(type_predicate, str):
        type_predicate = iri(type_predicate)
    return dataset.dictionary.lookup(type_predicate)


def extract_type_system(dataset: Dataset, type_predicate: Union[Term, str, None] = None) -> TypeSystem:
    """Scan the triples once and build T, P(T), I(T) and OC(p, T).

    Presence-only counting: an instance that sets ``p`` several times still
    contributes 1 to ``OC(p, T)``.
    """
    tp = resolve_type_predicate(dataset, type_predicate)
    stats = dataset_stats(dataset)
    types_of: dict[int, set[int]] = defaultdict(set)
    preds_of: dict[int, set[int]] = defaultdict(set)
    for s, p, o in dataset.triples:
        if p == tp:
            types_of[s].add(o)
        else:
            preds_of[s].add(p)
    if not types_of:
        return TypeSystem((), {}, {}, {}, tp, stats)

    instances: dict[int, set[int]] = defaultdict(set)
    properties: dict[int, set[int]] = defaultdict(set)
    occurrences: dict[tuple[int, int], int] = defaultdict(int)
    for s, ts in types_of.items():
        ps = preds_of.get(s, ())
        for t in ts:
            instances[t].add(s)
            properties[t].update(ps)
            for p in ps:
                occurrences[(t, p)] += 1
    types = tuple(sorted(instances))
    return TypeSystem(
        types,
        {t: frozenset(properties[t]) for t in types},
        {t: frozenset(instances[t]) for t in types},
        dict(occurrences),
        tp,
        stats,
    )


def coverage(typ: int, ts: TypeSystem) -> Fraction:
    props = ts.properties[typ]
    if not props:
        return Fraction(1)
    n_inst = len(ts.instances[typ])
    total = sum(ts.occurrences.get((typ, p), 0) for p in props)
    return Fraction(total, len(props) * n_inst)


def type_weights(ts: TypeSystem) -> dict[int, Fraction]:
    sizes = {t: len(ts.properties[t]) + len(ts.instances[t]) for t in ts.types}
    denom = sum(sizes.values())
    return {t: Fraction(v, denom) for t, v in sizes.items()}


@dataclass(frozen=True)
class CoherenceReport:
    coverage: dict[int, Fraction]
    weight: dict[int, Fraction]
    coherence: Fraction
    stats: DatasetStats

    @property
    def value(self) -> float:
        return float(self.coherence)


def coherence(ts: TypeSystem) -> CoherenceReport:
    if ts.is_empty:
        raise EmptyTypeSystem("dataset has no typed instances")
    cv = {t: coverage(t, ts) for t in ts.types}
    wt = type_weights(ts)
    ch = sum((wt[t] * cv[t] for t in ts.types), Fraction(0))
    return CoherenceReport(cv, wt, ch, ts.stats)


def dataset_coherence(dataset: Dataset, type_predicate: Union[Term, str, None] = None) -> Fraction:
    return coherence(extract_type_system(dataset, type_predicate)).coherence


def analyze(dataset: Dataset, type_predicate: Union[Term, str, None] = None) -> dict[str, object]:
    """Flat key/value report with Table-1 style column names."""
    ts = extract_type_system(dataset, type_predicate)
    st = ts.stats
    out: dict[str, object] = {
        "subjects": st.subjects,
        "predicates": st.predicates,
        "objects": st.objects,
        "triples": st.triples,
        "types": len(ts.types),
    }
    if ts.is_empty:
        out["structuredness"] = "undefined"
    else:
        out["structuredness"] = round(coherence(ts).value, 6)
    return out

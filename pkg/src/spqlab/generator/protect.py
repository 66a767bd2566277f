"""Protected (subject, predicate) pairs derived from a query suite.

Outside OPTIONAL, deleting triples can only remove solutions, so keeping
every triple that takes part in a solution on the seed keeps each answer
unchanged on every variant.  Those witness triples are found by evaluating
the pattern tree on the seed.

OPTIONAL is not monotone: dropping an extension that a later join or filter
rejected turns it into a padded row that survives.  So for every left outer
join the witness pass also keeps each right-hand row compatible with some
seed left row.  Left rows can only disappear, so no other right row can
ever matter.

Atoms the witness pass cannot pin down (longer paths) and queries that run
past the witness timeout fall back to constant masks: every triple the atom
could match is kept.
"""

from __future__ import annotations

from typing import Iterable, Union

from ..rdf import Dataset
from ..sparql.ast import (
    INVERSE,
    LINK,
    PLUS,
    SEQUENCE,
    STAR,
    ZERO_OR_ONE,
    Path,
    QueryForm,
    TriplePattern,
    Var,
    iter_atoms,
)
from ..sparql.parser import parse_query
from ..store.evaluate import EvalOptions, witness_table
from ..store.index import IndexedStore, load
from ..store.joins import left_join
from ..store.table import QueryTimeout


_ANY = Var("_any")


class Unprotectable(ValueError):
    """The query's answer depends on the node set of the whole graph."""


def _zero_length(path: Path) -> bool:
    if path.kind in (STAR, ZERO_OR_ONE):
        return True
    if path.kind == SEQUENCE:
        return all(_zero_length(a) for a in path.args)
    if path.kind == INVERSE:
        return _zero_length(path.args[0])
    return False


def _length_one(atom):
    if isinstance(atom, TriplePattern):
        return atom.s, atom.p, atom.o
    path = atom.path
    if path.kind == LINK:
        return atom.s, path.iri, atom.o
    if path.kind == INVERSE and path.args[0].kind == LINK:
        return atom.o, path.args[0].iri, atom.s
    return None


def _check(query: QueryForm):
    for atom in iter_atoms(query.where):
        if _length_one(atom) is None and _zero_length(atom.path) \
                and isinstance(atom.s, Var) and isinstance(atom.o, Var):
            raise Unprotectable(
                "a zero-length path between two variables matches every graph node")


def _atom_masks(atom, lookup):
    """(s, p, o) constant masks for one atom; ``None`` is a wildcard, -1 an unknown term."""

    def enc(x):
        if isinstance(x, Var):
            return None
        tid = lookup(x)
        return -1 if tid is None else tid

    spo = _length_one(atom)
    if spo is not None:
        return [tuple(enc(x) for x in spo)]
    # the intermediate nodes of a longer path are unconstrained: keep every
    # triple of each predicate on it
    return [(None, enc(t), None) for t in sorted(atom.path.iris(), key=lambda t: t.lexical)]


def _masks(query: QueryForm, dataset: Dataset):
    for atom in iter_atoms(query.where):
        yield from _atom_masks(atom, dataset.dictionary.lookup)


def _closure_witnesses(atom, table, store: IndexedStore):
    """Pairs along every walk a closure path can take from its solution starts.

    Returns ``None`` when the path shape is not a closure over one link.
    """
    path = atom.path
    if path.kind not in (PLUS, STAR, ZERO_OR_ONE) or not path.args[0].length_one:
        return None
    inner = path.args[0]
    backward = inner.kind == INVERSE
    pred = store.dictionary.lookup(inner.iri if inner.kind == LINK else inner.args[0].iri)
    if pred is None:
        return set()
    if isinstance(atom.s, Var):
        if atom.s.name not in table.schema:
            return None
        col = table.index(atom.s.name)
        frontier = {r[col] for r in table.rows if r[col] is not None}
    else:
        tid = store.dictionary.lookup(atom.s)
        frontier = set() if tid is None else {tid}
    seen = set(frontier)
    out: set[tuple[int, int]] = set()
    while frontier:
        nxt = set()
        for node in frontier:
            if backward:
                for subj, _, _ in store.scan((_ANY, pred, node))[1]:
                    out.add((subj, pred))
                    nxt.add(subj)
            else:
                for _, _, obj in store.scan((node, pred, _ANY))[1]:
                    out.add((node, pred))
                    nxt.add(obj)
        frontier = nxt - seen
        seen |= frontier
    return out


def _instantiate(atoms, table, store: IndexedStore, out: set, masks: list):
    """Add the (s, p) of every seed triple the rows of ``table`` give ``atoms``."""
    lookup = store.dictionary.lookup
    triples = set(store.triples)
    for atom in atoms:
        spo = _length_one(atom)
        if spo is None:
            walked = _closure_witnesses(atom, table, store)
            if walked is None:
                masks.extend(m for m in _atom_masks(atom, lookup) if -1 not in m)
            else:
                out |= walked
            continue
        slots = []
        for x in spo:
            if isinstance(x, Var):
                slots.append(table.index(x.name) if x.name in table.schema else None)
            else:
                tid = lookup(x)
                if tid is None:
                    break
                slots.append(-1 - tid)            # constants encoded below zero
        else:
            if None in slots:
                continue
            for row in table.rows:
                t = tuple(-1 - k if k < 0 else row[k] for k in slots)
                if None not in t and t in triples:
                    out.add((t[0], t[1]))


def _witnesses(query: QueryForm, store: IndexedStore, timeout_ms: float):
    """(s, p) of every seed triple some solution uses, plus masks for atoms left over."""
    opts = EvalOptions(timeout_ms=timeout_ms)
    log: list = []
    table = witness_table(store, query, opts, log)
    out: set[tuple[int, int]] = set()
    masks: list = []
    _instantiate(iter_atoms(query.where), table, store, out, masks)
    for node, left, right in log:
        # unconditioned, so rows the optional filter rejects are kept too (a superset)
        reachable = left_join(left, right)
        _instantiate(iter_atoms(node.group), reachable, store, out, masks)
    return out, masks


def protected_pairs(queries: Iterable[Union[str, QueryForm]], dataset: Dataset,
                    witness: bool = True, timeout_ms: float = 60_000.0) -> set[tuple[int, int]]:
    """Pairs that must keep their triples so every query in ``queries`` is unaffected.

    ``witness=False`` skips evaluation and keeps everything each atom could match.
    """
    forms = [parse_query(q) if isinstance(q, str) else q for q in queries]
    for form in forms:
        _check(form)
    out: set[tuple[int, int]] = set()
    masks = []
    store = None
    for form in forms:
        if witness:
            store = store or load(dataset)
            try:
                pairs, left = _witnesses(form, store, timeout_ms)
                out |= pairs
                masks.extend(left)
                continue
            except QueryTimeout:
                pass
        masks.extend(m for m in _masks(form, dataset) if -1 not in m)
    if not masks:
        return out
    by_pred: dict = {}
    loose = []
    for m in masks:
        if m[1] is None:
            loose.append(m)
        else:
            by_pred.setdefault(m[1], []).append(m)
    for s, p, o in dataset.triples:
        for m in by_pred.get(p, ()):
            if (m[0] is None or m[0] == s) and (m[2] is None or m[2] == o):
                out.add((s, p))
                break
        else:
            for m in loose:
                if (m[0] is None or m[0] == s) and (m[2] is None or m[2] == o):
                    out.add((s, p))
                    break
    return out


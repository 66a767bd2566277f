"""Six-permutation triple indexes with exact range-width cardinalities."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Union

from ..rdf import Dataset, Dictionary, EncodedTriple, Term
from ..sparql.ast import TriplePattern, Var
from .table import NO_DEADLINE, BindingTable, Deadline

ORDERS = ("SPO", "SOP", "PSO", "POS", "OSP", "OPS")
_POS = {"S": 0, "P": 1, "O": 2}
_HIGH = float("inf")

Slot = Union[int, Var]


class EncodedPattern(NamedTuple):
    """Triple pattern over term ids; ``Var`` marks variables, ``-1`` an unknown constant."""

    s: Slot
    p: Slot
    o: Slot

    def vars(self) -> list[str]:
        seen: dict[str, None] = {}
        for x in self:
            if isinstance(x, Var):
                seen.setdefault(x.name)
        return list(seen)

    def bound_positions(self) -> frozenset:
        return frozenset(i for i, x in enumerate(self) if not isinstance(x, Var))


MISSING = -1


def choose_order(bound: frozenset, prefer: tuple[int, ...] = ()) -> str:
    """Index whose prefix is exactly the bound positions; ``prefer`` orders the free ones."""
    free = [i for i in (0, 1, 2) if i not in bound]
    free.sort(key=lambda i: prefer.index(i) if i in prefer else 3 + i)
    seq = sorted(bound) + free
    return "".join("SPO"[i] for i in seq)


@dataclass
class IndexedStore:
    dictionary: Dictionary
    indexes: dict[str, list[tuple[int, int, int]]]
    predicate_counts: Counter
    predicate_object_counts: Counter
    _distinct: dict

    def __len__(self):
        return len(self.indexes["SPO"])

    @property
    def triples(self) -> list[tuple[int, int, int]]:
        return self.indexes["SPO"]

    # ----------------------------------------------------------------------

    def encode_pattern(self, pattern) -> EncodedPattern:
        if isinstance(pattern, EncodedPattern):
            return pattern
        slots = []
        for x in pattern:
            if isinstance(x, Var) or isinstance(x, int):
                slots.append(x)
            elif isinstance(x, Term):
                tid = self.dictionary.lookup(x)
                slots.append(MISSING if tid is None else tid)
            else:
                raise TypeError(f"cannot encode pattern component {x!r}")
        return EncodedPattern(*slots)

    def _range(self, order: str, prefix: tuple[int, ...]):
        idx = self.indexes[order]
        if not prefix:
            return idx, 0, len(idx)
        lo = bisect_left(idx, prefix)
        hi = bisect_right(idx, prefix + (_HIGH,) * (3 - len(prefix)))
        return idx, lo, hi

    def scan(self, pattern, prefer: tuple[int, ...] = ()):
        """Yield matching triples in SPO order from the best index.

        Returns ``(order, iterator)``.  Repeated variables are enforced.
        """
        ep = self.encode_pattern(pattern)
        if any(x == MISSING for x in ep):
            return choose_order(ep.bound_positions(), prefer), iter(())
        bound = ep.bound_positions()
        order = choose_order(bound, prefer)
        perm = [_POS[c] for c in order]
        prefix = tuple(ep[i] for i in perm[:len(bound)])
        idx, lo, hi = self._range(order, prefix)
        inv = [perm.index(i) for i in range(3)]
        same = _repeated_slots(ep)

        def gen():
            for k in range(lo, hi):
                row = idx[k]
                t = (row[inv[0]], row[inv[1]], row[inv[2]])
                if same and any(t[a] != t[b] for a, b in same):
                    continue
                yield t

        return order, gen()

    def count(self, pattern) -> int:
        ep = self.encode_pattern(pattern)
        if any(x == MISSING for x in ep):
            return 0
        if _repeated_slots(ep):
            return sum(1 for _ in self.scan(ep)[1])
        bound = ep.bound_positions()
        order = choose_order(bound)
        perm = [_POS[c] for c in order]
        _, lo, hi = self._range(order, tuple(ep[i] for i in perm[:len(bound)]))
        return hi - lo

    def distinct_values(self, pattern, position: int) -> int:
        """Distinct values at ``position`` among matches; exact for predicate-only patterns."""
        ep = self.encode_pattern(pattern)
        bound = ep.bound_positions()
        if bound == frozenset({1}) and position != 1:
            return self._distinct[(position, ep.p)]
        if not bound:
            return self._distinct[(position, None)]
        return len({t[position] for t in self.scan(ep)[1]})

    def lookup(self, pattern, prefer_vars: tuple[str, ...] = (),
               deadline: Deadline = NO_DEADLINE) -> BindingTable:
        """Rows for all matches; schema is the pattern's variables in s, p, o order."""
        ep = self.encode_pattern(pattern)
        names = ep.vars()
        first_pos = {}
        for i, x in enumerate(ep):
            if isinstance(x, Var):
                first_pos.setdefault(x.name, i)
        prefer = tuple(first_pos[v] for v in prefer_vars if v in first_pos)
        order, it = self.scan(ep, prefer)
        cols = [first_pos[v] for v in names]
        rows = []
        for t in it:
            deadline.check()
            rows.append(tuple(t[c] for c in cols))
        sorted_on = []
        for ch in order:
            i = _POS[ch]
            x = ep[i]
            if isinstance(x, Var) and x.name not in sorted_on:
                sorted_on.append(x.name)
        return BindingTable(tuple(names), rows, tuple(sorted_on))

    def nodes(self) -> set[int]:
        """Every id in subject or object position."""
        out = {t[0] for t in self.indexes["SPO"]}
        out.update(t[0] for t in self.indexes["OSP"])
        return out


def _repeated_slots(ep: EncodedPattern) -> list[tuple[int, int]]:
    out = []
    for a in range(3):
        for b in range(a + 1, 3):
            if isinstance(ep[a], Var) and ep[a] == ep[b]:
                out.append((a, b))
    return out


def load(triples: Union[Dataset, Iterable], dictionary: Optional[Dictionary] = None) -> IndexedStore:
    """Build all six orderings; duplicate triples collapse to one."""
    if isinstance(triples, Dataset):
        dictionary = triples.dictionary
        encoded = {tuple(t) for t in triples.triples}
    else:
        dictionary = dictionary if dictionary is not None else Dictionary()
        encoded = set()
        for t in triples:
            if isinstance(t, EncodedTriple) or (isinstance(t, tuple) and all(isinstance(x, int) for x in t)):
                encoded.add(tuple(t))
            else:
                encoded.add(tuple(dictionary.intern(x) for x in t))
    indexes = {}
    for order in ORDERS:
        perm = [_POS[c] for c in order]
        indexes[order] = sorted((t[perm[0]], t[perm[1]], t[perm[2]]) for t in encoded)
    pc = Counter(t[1] for t in encoded)
    poc = Counter((t[1], t[2]) for t in encoded)
    distinct: dict = {}
    subj: dict[int, set] = {}
    obj: dict[int, set] = {}
    for s, p, o in encoded:
        subj.setdefault(p, set()).add(s)
        obj.setdefault(p, set()).add(o)
    for p in pc:
        distinct[(0, p)] = len(subj[p])
        distinct[(2, p)] = len(obj[p])
    distinct[(0, None)] = len({t[0] for t in encoded})
    distinct[(1, None)] = len(pc)
    distinct[(2, None)] = len({t[2] for t in encoded})
    return IndexedStore(dictionary, indexes, pc, poc, distinct)


def lookup(store: IndexedStore, pattern) -> BindingTable:
    if isinstance(pattern, TriplePattern):
        pattern = (pattern.s, pattern.p, pattern.o)
    return store.lookup(pattern)


def estimate_cardinality(store: IndexedStore, pattern) -> int:
    if isinstance(pattern, TriplePattern):
        pattern = (pattern.s, pattern.p, pattern.o)
    return store.count(pattern)

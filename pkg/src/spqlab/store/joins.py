"""Natural joins over binding tables: nested loop, hash and merge.

All three honour SPARQL compatibility: a shared variable left unbound on
either side matches anything, and the merged row takes the bound value.
"""

from __future__ import annotations

from collections import defaultdict
from enum import Enum
from typing import Callable, Optional

from .table import NO_DEADLINE, BindingTable, Deadline


class JoinAlgorithm(str, Enum):
    NESTED_LOOP = "nl"
    HASH = "hash"
    MERGE = "merge"


ALGORITHMS = (JoinAlgorithm.NESTED_LOOP, JoinAlgorithm.HASH, JoinAlgorithm.MERGE)


class UnsortedInput(ValueError):
    """Merge join called on inputs not sorted on the shared variables."""


class _Layout:
    def __init__(self, left: BindingTable, right: BindingTable):
        self.shared = [v for v in left.schema if v in right.schema]
        self.li = [left.index(v) for v in self.shared]
        self.ri = [right.index(v) for v in self.shared]
        self.extra = [i for i, v in enumerate(right.schema) if v not in left.schema]
        self.schema = left.schema + tuple(right.schema[i] for i in self.extra)

    def compatible(self, lr, rr) -> bool:
        for a, b in zip(self.li, self.ri):
            x, y = lr[a], rr[b]
            if x is not None and y is not None and x != y:
                return False
        return True

    def merge(self, lr, rr) -> tuple:
        if any(lr[a] is None and rr[b] is not None for a, b in zip(self.li, self.ri)):
            out = list(lr)
            for a, b in zip(self.li, self.ri):
                if out[a] is None:
                    out[a] = rr[b]
            lr = tuple(out)
        return lr + tuple(rr[i] for i in self.extra)


def _key(row, idx):
    return tuple(row[i] for i in idx)


def nested_loop_join(left: BindingTable, right: BindingTable,
                     deadline: Deadline = NO_DEADLINE) -> BindingTable:
    lay = _Layout(left, right)
    out = []
    for lr in left.rows:
        for rr in right.rows:
            deadline.check()
            if lay.compatible(lr, rr):
                out.append(lay.merge(lr, rr))
    return BindingTable(lay.schema, out, left.sorted_on)


def hash_join(left: BindingTable, right: BindingTable,
              deadline: Deadline = NO_DEADLINE) -> BindingTable:
    """Build on the right input, probe with the left; output follows left order."""
    lay = _Layout(left, right)
    if not lay.shared:
        return nested_loop_join(left, right, deadline)
    table: dict[tuple, list] = defaultdict(list)
    wild = []                       # right rows with an unbound key cell
    for rr in right.rows:
        k = _key(rr, lay.ri)
        (wild if None in k else table[k]).append(rr)
    out = []
    for lr in left.rows:
        k = _key(lr, lay.li)
        if None in k:
            cands = right.rows
        else:
            cands = table.get(k, ())
            if wild:
                cands = list(cands) + wild
        for rr in cands:
            deadline.check()
            if lay.compatible(lr, rr):
                out.append(lay.merge(lr, rr))
    return BindingTable(lay.schema, out, left.sorted_on)


def merge_key_order(left: BindingTable, right: BindingTable) -> Optional[tuple[str, ...]]:
    """Shared variables in an order both inputs are sorted on, or None."""
    shared = {v for v in left.schema if v in right.schema}
    k = len(shared)
    if not shared:
        return ()
    lk, rk = left.sorted_on[:k], right.sorted_on[:k]
    if len(lk) == k and lk == rk and set(lk) == shared:
        return tuple(lk)
    return None


def _check_sorted(rows, idx, side):
    prev = None
    for r in rows:
        k = _key(r, idx)
        if None in k:
            raise UnsortedInput(f"{side} input has unbound values in its sort key")
        if prev is not None and k < prev:
            raise UnsortedInput(f"{side} input is not sorted on the join key")
        prev = k


def merge_join(left: BindingTable, right: BindingTable,
               deadline: Deadline = NO_DEADLINE) -> BindingTable:
    order = merge_key_order(left, right)
    if order is None:
        raise UnsortedInput(
            f"merge join needs both inputs sorted on the shared variables; "
            f"left sorted on {left.sorted_on}, right on {right.sorted_on}")
    if not order:
        return nested_loop_join(left, right, deadline)
    lay = _Layout(left, right)
    li = [left.index(v) for v in order]
    ri = [right.index(v) for v in order]
    _check_sorted(left.rows, li, "left")
    _check_sorted(right.rows, ri, "right")
    out = []
    L, R = left.rows, right.rows
    i = j = 0
    while i < len(L) and j < len(R):
        deadline.check()
        kl, kr = _key(L[i], li), _key(R[j], ri)
        if kl < kr:
            i += 1
        elif kl > kr:
            j += 1
        else:
            i2 = i
            while i2 < len(L) and _key(L[i2], li) == kl:
                i2 += 1
            j2 = j
            while j2 < len(R) and _key(R[j2], ri) == kr:
                j2 += 1
            for lr in L[i:i2]:
                for rr in R[j:j2]:
                    deadline.check()
                    if lay.compatible(lr, rr):
                        out.append(lay.merge(lr, rr))
            i, j = i2, j2
    return BindingTable(lay.schema, out, order)


def sort_table(table: BindingTable, variables) -> BindingTable:
    """Sort rows on ``variables``, which must be bound in every row."""
    idx = [table.index(v) for v in variables]
    if any(r[i] is None for r in table.rows for i in idx):
        raise UnsortedInput("cannot sort on variables that are unbound in some rows")
    rows = sorted(table.rows, key=lambda r: _key(r, idx))
    return BindingTable(table.schema, rows, tuple(variables))


_DISPATCH: dict[JoinAlgorithm, Callable] = {
    JoinAlgorithm.NESTED_LOOP: nested_loop_join,
    JoinAlgorithm.HASH: hash_join,
    JoinAlgorithm.MERGE: merge_join,
}


def join(left: BindingTable, right: BindingTable, algorithm=JoinAlgorithm.HASH,
         deadline: Deadline = NO_DEADLINE) -> BindingTable:
    return _DISPATCH[JoinAlgorithm(algorithm)](left, right, deadline)


def left_join(left: BindingTable, right: BindingTable,
              condition: Optional[Callable[[dict], bool]] = None,
              deadline: Deadline = NO_DEADLINE) -> BindingTable:
    """OPTIONAL: every left row survives, extended by compatible right rows
    passing ``condition`` when any exist, otherwise padded with unbound cells."""
    lay = _Layout(left, right)
    table: dict[tuple, list] = defaultdict(list)
    wild = []
    for rr in right.rows:
        k = _key(rr, lay.ri)
        (wild if None in k else table[k]).append(rr)
    pad = (None,) * len(lay.extra)
    out = []
    for lr in left.rows:
        k = _key(lr, lay.li)
        cands = right.rows if None in k else list(table.get(k, ())) + wild
        hit = False
        for rr in cands:
            deadline.check()
            if not lay.compatible(lr, rr):
                continue
            merged = lay.merge(lr, rr)
            if condition is not None and not condition(dict(zip(lay.schema, merged))):
                continue
            out.append(merged)
            hit = True
        if not hit:
            out.append(lr + pad)
    return BindingTable(lay.schema, out, left.sorted_on)


def union(tables: list[BindingTable]) -> BindingTable:
    schema: list[str] = []
    for t in tables:
        for v in t.schema:
            if v not in schema:
                schema.append(v)
    rows = []
    for t in tables:
        rows.extend(t.project(schema).rows)
    return BindingTable(tuple(schema), rows)

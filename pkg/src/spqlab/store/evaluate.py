"""Query evaluation over an :class:`IndexedStore`."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Union

from ..rdf import XSD, Dictionary, Term, literal
from ..sparql.ast import (
    BGP,
    INVERSE,
    LINK,
    PLUS,
    SEQUENCE,
    STAR,
    ZERO_OR_ONE,
    Bound,
    BoolOp,
    Compare,
    Group,
    Not,
    OptionalPattern,
    Path,
    PathPattern,
    QueryForm,
    TriplePattern,
    UnionPattern,
    Var,
    optional_depth,
    pattern_vars,
)
from ..sparql.parser import UnsupportedFeature, parse_query
from .index import MISSING, EncodedPattern, IndexedStore
from .joins import JoinAlgorithm, hash_join, join, left_join, merge_key_order, sort_table, union
from .planner import PlannerConfig, plan
from .table import BindingTable, Deadline, QueryTimeout
from .values import compare, order_key

MAX_OPTIONAL_DEPTH = 2


@dataclass(frozen=True)
class EvalOptions:
    mode: str = "greedy"
    algorithm: Optional[str] = None          # nl, hash, merge or None for the planner's pick
    timeout_ms: Optional[float] = None
    memory_rows: int = 1_000_000
    noise: float = 1.0
    noise_seed: int = 0

    def planner(self) -> PlannerConfig:
        algo = None if self.algorithm in (None, "auto") else self.algorithm
        return PlannerConfig(self.mode, algo, self.memory_rows, self.noise, self.noise_seed)


@dataclass
class QueryMetrics:
    wall_ms: float = 0.0
    peak_rows: int = 0
    plans: list[str] = field(default_factory=list)
    candidates: int = 0
    plan_cost: float = 0.0

    def lines(self) -> list[str]:
        return [
            f"wall_ms={self.wall_ms:.3f}",
            f"peak_rows={self.peak_rows}",
            f"plan_candidates={self.candidates}",
            f"plan_cost={self.plan_cost:.1f}",
            "plan=" + (" | ".join(self.plans) if self.plans else "none"),
        ]


@dataclass
class QueryResult:
    variables: tuple[str, ...]
    rows: list[tuple[Optional[Term], ...]]
    metrics: QueryMetrics

    def __len__(self):
        return len(self.rows)

    def multiset(self) -> Counter:
        """Rows as a multiset of frozensets of bound (variable, term) pairs."""
        return Counter(frozenset((v, t) for v, t in zip(self.variables, r) if t is not None)
                       for r in self.rows)

    def column(self, var: str) -> list:
        i = self.variables.index(var)
        return [r[i] for r in self.rows]


class Overlay:
    """Store dictionary plus query-local ids for constants the store lacks."""

    def __init__(self, dictionary: Dictionary):
        self.dictionary = dictionary
        self.base = dictionary.next_id
        self.local: dict[Term, int] = {}
        self.terms: list[Term] = []

    def id(self, term: Term) -> int:
        tid = self.dictionary.lookup(term)
        if tid is not None:
            return tid
        if term not in self.local:
            self.local[term] = self.base + len(self.terms)
            self.terms.append(term)
        return self.local[term]

    def term(self, tid: Optional[int]) -> Optional[Term]:
        if tid is None:
            return None
        if tid >= self.base:
            return self.terms[tid - self.base]
        return self.dictionary.term(tid)


def _length_one(atom):
    if isinstance(atom, TriplePattern):
        return atom
    p = atom.path
    if p.kind == LINK:
        return TriplePattern(atom.s, p.iri, atom.o)
    if p.kind == INVERSE and p.args[0].kind == LINK:
        return TriplePattern(atom.o, p.args[0].iri, atom.s)
    return None


class _Evaluator:
    def __init__(self, store: IndexedStore, options: EvalOptions):
        self.store = store
        self.options = options
        self.overlay = Overlay(store.dictionary)
        secs = None if options.timeout_ms is None else options.timeout_ms / 1000.0
        self.deadline = Deadline(secs)
        self.metrics = QueryMetrics()
        self.optional_log: Optional[list] = None

    def note(self, table: BindingTable) -> BindingTable:
        self.metrics.peak_rows = max(self.metrics.peak_rows, len(table))
        self.deadline.check_now()
        return table

    # patterns ------------------------------------------------------------

    def encode(self, tp: TriplePattern) -> EncodedPattern:
        slots = []
        for x in (tp.s, tp.p, tp.o):
            if isinstance(x, Var):
                slots.append(x)
            else:
                tid = self.store.dictionary.lookup(x)
                slots.append(MISSING if tid is None else tid)
        return EncodedPattern(*slots)

    def bgp(self, node: BGP) -> BindingTable:
        plain, paths = [], []
        for atom in node.atoms:
            tp = _length_one(atom)
            if tp is None:
                paths.append(atom)
            else:
                plain.append(self.encode(tp))
        table = BindingTable.unit()
        if plain:
            table = self.run_plan(plain)
        for atom in paths:
            table = self.note(hash_join(table, self.path_atom(atom), self.deadline))
        return table

    def run_plan(self, patterns: list[EncodedPattern]) -> BindingTable:
        cfg = self.options.planner()
        if len(patterns) > 6 and cfg.mode == "exhaustive":
            cfg = PlannerConfig("greedy", cfg.algorithm, cfg.memory_rows, cfg.noise, cfg.noise_seed)
        pl = plan(self.store, patterns, cfg)
        self.metrics.plans.append(pl.describe())
        self.metrics.candidates += pl.candidates
        self.metrics.plan_cost += pl.cost
        first = pl.steps[0]
        table = self.note(self.store.lookup(patterns[first.pattern], first.sort_on, self.deadline))
        for step in pl.steps[1:]:
            right = self.note(self.store.lookup(patterns[step.pattern], step.sort_on, self.deadline))
            algo = step.algorithm
            if algo == JoinAlgorithm.MERGE and merge_key_order(table, right) is None:
                shared = [v for v in table.schema if v in right.schema]
                key = tuple(v for v in right.sorted_on[:len(shared)])
                if set(key) != set(shared):
                    algo = JoinAlgorithm.HASH
                else:
                    table = sort_table(table, key)
            table = self.note(join(table, right, algo, self.deadline))
        return table

    # property paths --------------------------------------------------------

    def succ(self, path: Path, node: int) -> list[int]:
        """Multiset of nodes reachable from ``node`` along ``path``."""
        self.deadline.check()
        kind = path.kind
        if kind == LINK:
            pid = self.store.dictionary.lookup(path.iri)
            if pid is None:
                return []
            return [t[2] for t in self.store.scan((node, pid, Var("_o")))[1]]
        if kind == INVERSE:
            inner = path.args[0]
            if inner.kind == LINK:
                pid = self.store.dictionary.lookup(inner.iri)
                if pid is None:
                    return []
                return [t[0] for t in self.store.scan((Var("_s"), pid, node))[1]]
            return self.succ(inner.inverse(), node)
        if kind == SEQUENCE:
            frontier = [node]
            for step in path.args:
                frontier = [m for n in frontier for m in self.succ(step, n)]
            return frontier
        inner = path.args[0]
        if kind == ZERO_OR_ONE:
            return sorted({node, *self.succ(inner, node)})
        seen: set[int] = set()
        frontier = list(dict.fromkeys(self.succ(inner, node)))
        while frontier:
            nxt = []
            for n in frontier:
                if n in seen:
                    continue
                seen.add(n)
                for m in self.succ(inner, n):
                    if m not in seen:
                        nxt.append(m)
            frontier = nxt
        if kind == STAR:
            seen.add(node)
        elif kind != PLUS:
            raise UnsupportedFeature(f"path modifier {kind}")
        return sorted(seen)

    def starts(self, path: Path) -> list[int]:
        """Nodes that can begin a match of ``path``."""
        kind = path.kind
        if kind in (STAR, ZERO_OR_ONE):
            return sorted(self.store.nodes())
        if kind == LINK or (kind == INVERSE and path.args[0].kind == LINK):
            iri_ = path.iri if kind == LINK else path.args[0].iri
            pid = self.store.dictionary.lookup(iri_)
            if pid is None:
                return []
            col = 0 if kind == LINK else 2
            return sorted({t[col] for t in self.store.scan((Var("_s"), pid, Var("_o")))[1]})
        if kind == INVERSE:
            return self.starts(path.args[0].inverse())
        if kind == SEQUENCE:
            return self.starts(path.args[0])
        return self.starts(path.args[0])

    def path_atom(self, atom: PathPattern) -> BindingTable:
        s, o, path = atom.s, atom.o, atom.path
        sv, ov = isinstance(s, Var), isinstance(o, Var)
        if not sv and not ov:
            a, b = self.overlay.id(s), self.overlay.id(o)
            n = sum(1 for x in self.succ(path, a) if x == b)
            return BindingTable((), [()] * n)
        if not sv:
            a = self.overlay.id(s)
            return BindingTable((o.name,), [(x,) for x in self.succ(path, a)])
        if not ov:
            b = self.overlay.id(o)
            return BindingTable((s.name,), [(x,) for x in self.succ(path.inverse(), b)])
        rows = []
        for a in self.starts(path):
            for b in self.succ(path, a):
                if s == o and a != b:
                    continue
                rows.append((a,) if s == o else (a, b))
        schema = (s.name,) if s == o else (s.name, o.name)
        return BindingTable(schema, rows)

    # groups ----------------------------------------------------------------

    def group(self, g: Group) -> BindingTable:
        table = None
        for el in g.elements:
            if isinstance(el, OptionalPattern):
                right = self.group(Group(el.group.elements))
                cond = None
                if el.group.filters:
                    filters = el.group.filters
                    cond = lambda b, fs=filters: all(self.test(f, b) for f in fs)
                left = table if table is not None else BindingTable.unit()
                if self.optional_log is not None:
                    self.optional_log.append((el, left, right))
                table = self.note(left_join(left, right, cond, self.deadline))
                continue
            if isinstance(el, BGP):
                part = self.bgp(el)
            elif isinstance(el, UnionPattern):
                part = self.note(union([self.group(b) for b in el.branches]))
            else:
                part = self.group(el)
            table = part if table is None else self.note(hash_join(table, part, self.deadline))
        if table is None:
            table = BindingTable.unit()
        if g.filters:
            rows = []
            for r in table.rows:
                b = dict(zip(table.schema, r))
                if all(self.test(f, b) for f in g.filters):
                    rows.append(r)
            table = BindingTable(table.schema, rows, table.sorted_on)
        return table

    # filters ---------------------------------------------------------------

    def value(self, node, binding: dict) -> Optional[Term]:
        if isinstance(node, Var):
            return self.overlay.term(binding.get(node.name))
        return node

    def truth(self, e, binding: dict) -> Optional[bool]:
        if isinstance(e, Compare):
            return compare(e.op, self.value(e.left, binding), self.value(e.right, binding))
        if isinstance(e, Bound):
            return binding.get(e.var.name) is not None
        if isinstance(e, Not):
            v = self.truth(e.arg, binding)
            return None if v is None else not v
        if isinstance(e, BoolOp):
            vals = [self.truth(a, binding) for a in e.args]
            if e.op == "&&":
                if any(v is False for v in vals):
                    return False
                return None if any(v is None for v in vals) else True
            if any(v is True for v in vals):
                return True
            return None if any(v is None for v in vals) else False
        raise UnsupportedFeature(f"filter expression {type(e).__name__}")

    def test(self, e, binding: dict) -> bool:
        return self.truth(e, binding) is True

    # solution modifiers ----------------------------------------------------

    def aggregate(self, q: QueryForm, table: BindingTable) -> BindingTable:
        keys = [v.name for v in q.group_by]
        idx = [table.index(k) if k in table.schema else None for k in keys]
        groups: dict[tuple, list] = {}
        if not keys:
            groups[()] = list(table.rows)
        for r in table.rows if keys else ():
            groups.setdefault(tuple(r[i] if i is not None else None for i in idx), []).append(r)
        aggs = [p for p in (q.projection or ()) if p.aggregate is not None]
        schema = tuple(keys) + tuple(p.var.name for p in aggs)
        rows = []
        for gk, members in groups.items():
            out = list(gk)
            for p in aggs:
                a = p.aggregate
                if a.arg is None:
                    n = len(set(members)) if a.distinct else len(members)
                else:
                    if a.arg.name in table.schema:
                        i = table.index(a.arg.name)
                        vals = [r[i] for r in members if r[i] is not None]
                    else:
                        vals = []
                    n = len(set(vals)) if a.distinct else len(vals)
                out.append(self.overlay.id(literal(str(n), XSD + "integer")))
            rows.append(tuple(out))
        return BindingTable(schema, rows)

    def finish(self, q: QueryForm, table: BindingTable) -> tuple[tuple[str, ...], list[tuple]]:
        if q.has_aggregate:
            table = self.aggregate(q, table)
            names = tuple(p.var.name for p in q.projection) if q.projection else tuple(table.schema)
        elif q.projection is None:
            names = tuple(v.name for v in pattern_vars(q.where))
        else:
            names = tuple(p.var.name for p in q.projection)
        term = self.overlay.term
        proj_idx = [table.index(v) if v in table.schema else None for v in names]
        rows = [tuple(term(r[i]) if i is not None else None for i in proj_idx) for r in table.rows]
        canonical = q.limit is not None or q.offset is not None
        if q.order_by or canonical:
            okeys = []
            for k in q.order_by:
                i = table.index(k.var.name) if k.var.name in table.schema else None
                okeys.append((i, k.descending))
            decorated = list(zip(table.rows, rows))
            if canonical:
                decorated.sort(key=lambda pr: tuple(order_key(t) for t in pr[1]))
            for i, desc in reversed(okeys):
                decorated.sort(key=lambda pr: order_key(term(pr[0][i]) if i is not None else None),
                               reverse=desc)
            rows = [pr[1] for pr in decorated]
        if q.distinct:
            rows = list(dict.fromkeys(rows))
        start = q.offset or 0
        stop = None if q.limit is None else start + q.limit
        return names, rows[start:stop]


def witness_table(store: IndexedStore, query: Union[str, QueryForm],
                  options: EvalOptions = EvalOptions(),
                  optional_log: Optional[list] = None) -> BindingTable:
    """Encoded solutions of the pattern tree, before projection and modifiers.

    When ``optional_log`` is a list, every left outer join appends its
    ``(OptionalPattern, left, right)`` inputs to it.
    """
    q = parse_query(query) if isinstance(query, str) else query
    if optional_depth(q.where) > MAX_OPTIONAL_DEPTH:
        raise UnsupportedFeature(f"OPTIONAL nested deeper than {MAX_OPTIONAL_DEPTH}")
    ev = _Evaluator(store, options)
    ev.optional_log = optional_log
    return ev.group(q.where)


def evaluate(store: IndexedStore, query: Union[str, QueryForm],
             options: EvalOptions = EvalOptions()) -> QueryResult:
    """Run ``query`` and return decoded rows plus metrics.

    Raises :class:`UnsupportedFeature` for constructs outside the subset and
    :class:`QueryTimeout` once ``options.timeout_ms`` is exceeded.
    """
    t0 = time.perf_counter()
    q = parse_query(query) if isinstance(query, str) else query
    if optional_depth(q.where) > MAX_OPTIONAL_DEPTH:
        raise UnsupportedFeature(f"OPTIONAL nested deeper than {MAX_OPTIONAL_DEPTH}")
    ev = _Evaluator(store, options)
    table = ev.group(q.where)
    names, rows = ev.finish(q, table)
    ev.deadline.check_now()
    ev.metrics.wall_ms = (time.perf_counter() - t0) * 1000.0
    return QueryResult(names, rows, ev.metrics)


__all__ = ["EvalOptions", "QueryMetrics", "QueryResult", "QueryTimeout", "evaluate", "witness_table"]

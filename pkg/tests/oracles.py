"""Deliberately naive reference implementations used as test oracles."""

from collections import Counter, defaultdict
from fractions import Fraction

from spqlab.rdf import LITERAL, XSD
from spqlab.sparql.ast import (
    BGP,
    INVERSE,
    LINK,
    PLUS,
    SEQUENCE,
    STAR,
    ZERO_OR_ONE,
    BoolOp,
    Bound,
    Compare,
    Group,
    Not,
    OptionalPattern,
    PathPattern,
    TriplePattern,
    UnionPattern,
    Var,
)


# --------------------------------------------------------------------------
# coherence


def naive_coherence(triples, type_pred):
    """Re-scan the raw triples once per (type, property) pair."""
    types = sorted({o for s, p, o in triples if p == type_pred}, key=repr)
    if not types:
        return None
    total_weight = 0
    parts = []
    for t in types:
        inst = {s for s, p, o in triples if p == type_pred and o == t}
        props = {p for s, p, o in triples if s in inst and p != type_pred}
        total_weight += len(props) + len(inst)
        if not props:
            parts.append((len(props) + len(inst), Fraction(1)))
            continue
        hits = 0
        for prop in props:
            hits += len({s for s, p, o in triples if p == prop} & inst)
        parts.append((len(props) + len(inst), Fraction(hits, len(props) * len(inst))))
    return sum(Fraction(w, total_weight) * cv for w, cv in parts)


# --------------------------------------------------------------------------
# joins


def naive_join(left_schema, left_rows, right_schema, right_rows):
    """Multiset of merged bindings, as frozensets of bound (var, value) pairs."""
    out = Counter()
    for lr in left_rows:
        lb = {v: x for v, x in zip(left_schema, lr) if x is not None}
        for rr in right_rows:
            rb = {v: x for v, x in zip(right_schema, rr) if x is not None}
            if all(lb[v] == rb[v] for v in lb.keys() & rb.keys()):
                out[frozenset({**lb, **rb}.items())] += 1
    return out


# --------------------------------------------------------------------------
# SPARQL


def _num(t):
    if t.kind == LITERAL and t.datatype == XSD + "integer":
        return int(t.lexical)
    return None


def _cmp(op, a, b):
    if a is None or b is None:
        return None
    na, nb = _num(a), _num(b)
    if na is not None and nb is not None:
        x, y = na, nb
    elif op in ("=", "!="):
        return (a == b) if op == "=" else (a != b)
    else:
        return None
    return {"=": x == y, "!=": x != y, "<": x < y, ">": x > y, "<=": x <= y, ">=": x >= y}[op]


def _truth(e, b):
    if isinstance(e, Compare):
        val = lambda n: b.get(n.name) if isinstance(n, Var) else n
        return _cmp(e.op, val(e.left), val(e.right))
    if isinstance(e, Bound):
        return e.var.name in b
    if isinstance(e, Not):
        v = _truth(e.arg, b)
        return None if v is None else not v
    vals = [_truth(a, b) for a in e.args]
    if e.op == "&&":
        if False in vals:
            return False
        return None if None in vals else True
    if True in vals:
        return True
    return None if None in vals else False


class NaiveSparql:
    """Textbook algebra over decoded triples; lists of dicts as multisets."""

    def __init__(self, triples):
        self.triples = list(dict.fromkeys(triples))
        self.nodes = {t[0] for t in self.triples} | {t[2] for t in self.triples}

    def pairs(self, path, extra=()):
        """Counter of (start, end) pairs."""
        if path.kind == LINK:
            return Counter((s, o) for s, p, o in self.triples if p == path.iri)
        if path.kind == INVERSE:
            return Counter({(b, a): n for (a, b), n in self.pairs(path.args[0], extra).items()})
        if path.kind == SEQUENCE:
            acc = self.pairs(path.args[0], extra)
            for step in path.args[1:]:
                nxt = self.pairs(step, extra)
                by_start = defaultdict(list)
                for (a, b), n in nxt.items():
                    by_start[a].append((b, n))
                out = Counter()
                for (a, b), n in acc.items():
                    for c, m in by_start.get(b, ()):
                        out[(a, c)] += n * m
                acc = out
            return acc
        inner = set(self.pairs(path.args[0], extra))
        ident = {(n, n) for n in self.nodes | set(extra)}
        if path.kind == ZERO_OR_ONE:
            return Counter(inner | ident)
        closure = set(inner)
        while True:
            new = {(a, d) for (a, b) in closure for (c, d) in inner if b == c} - closure
            if not new:
                break
            closure |= new
        if path.kind == STAR:
            closure |= ident
        return Counter(closure)

    def atom(self, atom):
        if isinstance(atom, TriplePattern):
            out = []
            for t in self.triples:
                b = {}
                ok = True
                for x, v in zip((atom.s, atom.p, atom.o), t):
                    if isinstance(x, Var):
                        if b.setdefault(x.name, v) != v:
                            ok = False
                    elif x != v:
                        ok = False
                if ok:
                    out.append(b)
            return out
        extra = [x for x in (atom.s, atom.o) if not isinstance(x, Var)]
        out = []
        for (a, c), n in self.pairs(atom.path, extra).items():
            b = {}
            ok = True
            for x, v in ((atom.s, a), (atom.o, c)):
                if isinstance(x, Var):
                    if b.setdefault(x.name, v) != v:
                        ok = False
                elif x != v:
                    ok = False
            if ok:
                out.extend(dict(b) for _ in range(n))
        return out

    @staticmethod
    def join(left, right):
        return [{**l, **r} for l in left for r in right
                if all(l[k] == r[k] for k in l.keys() & r.keys())]

    @staticmethod
    def left_join(left, right, filters):
        out = []
        for l in left:
            hit = False
            for r in right:
                if all(l[k] == r[k] for k in l.keys() & r.keys()):
                    m = {**l, **r}
                    if all(_truth(f, m) is True for f in filters):
                        out.append(m)
                        hit = True
            if not hit:
                out.append(l)
        return out

    def group(self, g):
        sol = [{}]
        for el in g.elements:
            if isinstance(el, OptionalPattern):
                inner = self.group(Group(el.group.elements))
                sol = self.left_join(sol, inner, el.group.filters)
            elif isinstance(el, BGP):
                for a in el.atoms:
                    sol = self.join(sol, self.atom(a))
            elif isinstance(el, UnionPattern):
                part = [b for br in el.branches for b in self.group(br)]
                sol = self.join(sol, part)
            else:
                sol = self.join(sol, self.group(el))
        return [b for b in sol if all(_truth(f, b) is True for f in g.filters)]

    def select(self, q):
        """Projected multiset: Counter of frozensets of bound pairs."""
        sol = self.group(q.where)
        names = [p.var.name for p in q.projection] if q.projection else None
        out = Counter()
        for b in sol:
            if names is not None:
                b = {k: v for k, v in b.items() if k in names}
            out[frozenset(b.items())] += 1
        if q.distinct:
            out = Counter({k: 1 for k in out})
        return out


def result_multiset(result):
    out = Counter()
    for row in result.rows:
        out[frozenset((v, t) for v, t in zip(result.variables, row) if t is not None)] += 1
    return out

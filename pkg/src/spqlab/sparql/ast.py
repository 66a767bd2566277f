"""Algebra for the supported SELECT subset."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..rdf import Term


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


Node = Union[Term, Var]

LINK = "link"
INVERSE = "inverse"
SEQUENCE = "sequence"
PLUS = "plus"
STAR = "star"
ZERO_OR_ONE = "zero_or_one"


@dataclass(frozen=True)
class Path:
    kind: str
    iri: Optional[Term] = None
    args: tuple["Path", ...] = ()

    @property
    def length_one(self) -> bool:
        return self.kind == LINK or (self.kind == INVERSE and self.args[0].kind == LINK)

    def iris(self) -> set[Term]:
        if self.kind == LINK:
            return {self.iri}
        out: set[Term] = set()
        for a in self.args:
            out |= a.iris()
        return out

    def inverse(self) -> "Path":
        if self.kind == LINK:
            return Path(INVERSE, args=(self,))
        if self.kind == INVERSE:
            return self.args[0]
        if self.kind == SEQUENCE:
            return Path(SEQUENCE, args=tuple(a.inverse() for a in reversed(self.args)))
        return Path(self.kind, args=(self.args[0].inverse(),))


def link(t: Term) -> Path:
    return Path(LINK, iri=t)


@dataclass(frozen=True)
class TriplePattern:
    s: Node
    p: Node
    o: Node

    def vars(self) -> list[Var]:
        return [x for x in (self.s, self.p, self.o) if isinstance(x, Var)]


@dataclass(frozen=True)
class PathPattern:
    s: Node
    path: Path
    o: Node

    def vars(self) -> list[Var]:
        return [x for x in (self.s, self.o) if isinstance(x, Var)]


Atom = Union[TriplePattern, PathPattern]


# filter expressions

@dataclass(frozen=True)
class Compare:
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class BoolOp:
    op: str                 # "&&" or "||"
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class Bound:
    var: Var


Expr = Union[Compare, BoolOp, Not, Bound]


# graph patterns

@dataclass(frozen=True)
class BGP:
    atoms: tuple[Atom, ...]


@dataclass(frozen=True)
class Group:
    elements: tuple["Element", ...]
    filters: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class OptionalPattern:
    group: Group


@dataclass(frozen=True)
class UnionPattern:
    branches: tuple[Group, ...]


Element = Union[BGP, Group, OptionalPattern, UnionPattern]


@dataclass(frozen=True)
class Aggregate:
    func: str                       # only COUNT is evaluated
    arg: Optional[Var]              # None means COUNT(*)
    distinct: bool = False


@dataclass(frozen=True)
class Projection:
    var: Var
    aggregate: Optional[Aggregate] = None


@dataclass(frozen=True)
class OrderKey:
    var: Var
    descending: bool = False


@dataclass(frozen=True)
class QueryForm:
    projection: Optional[tuple[Projection, ...]]   # None means SELECT *
    where: Group
    distinct: bool = False
    group_by: tuple[Var, ...] = ()
    order_by: tuple[OrderKey, ...] = ()
    limit: Optional[int] = None
    offset: Optional[int] = None

    @property
    def has_aggregate(self) -> bool:
        return bool(self.group_by) or any(p.aggregate for p in self.projection or ())


def iter_atoms(el) -> list[Atom]:
    """All triple and path atoms below a pattern node."""
    out: list[Atom] = []
    if isinstance(el, BGP):
        out.extend(el.atoms)
    elif isinstance(el, Group):
        for e in el.elements:
            out.extend(iter_atoms(e))
    elif isinstance(el, OptionalPattern):
        out.extend(iter_atoms(el.group))
    elif isinstance(el, UnionPattern):
        for b in el.branches:
            out.extend(iter_atoms(b))
    return out


def pattern_vars(el) -> list[Var]:
    seen: dict[Var, None] = {}
    for a in iter_atoms(el):
        for v in a.vars():
            seen.setdefault(v)
    return list(seen)


def optional_depth(el, depth: int = 0) -> int:
    if isinstance(el, OptionalPattern):
        return optional_depth(el.group, depth + 1)
    if isinstance(el, Group):
        return max([depth] + [optional_depth(e, depth) for e in el.elements])
    if isinstance(el, UnionPattern):
        return max([depth] + [optional_depth(b, depth) for b in el.branches])
    return depth


def walk(el):
    """Yield every pattern node, depth first."""
    yield el
    if isinstance(el, Group):
        for e in el.elements:
            yield from walk(e)
    elif isinstance(el, OptionalPattern):
        yield from walk(el.group)
    elif isinstance(el, UnionPattern):
        for b in el.branches:
            yield from walk(b)


def iter_filters(el) -> list[Expr]:
    return [f for node in walk(el) if isinstance(node, Group) for f in node.filters]

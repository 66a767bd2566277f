"""Recursive-descent parser and printer for the supported SPARQL subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..rdf import LITERAL, RDF_TYPE, XSD, Term, iri
from .ast import (
    BGP,
    INVERSE,
    LINK,
    PLUS,
    SEQUENCE,
    STAR,
    ZERO_OR_ONE,
    Aggregate,
    BoolOp,
    Bound,
    Compare,
    Group,
    Not,
    OptionalPattern,
    OrderKey,
    Path,
    PathPattern,
    Projection,
    QueryForm,
    TriplePattern,
    UnionPattern,
    Var,
    iter_atoms,
    pattern_vars,
)


class QuerySyntaxError(SyntaxError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position
        self.reason = message


class UnsupportedFeature(Exception):
    """A recognised SPARQL construct that this subset does not evaluate."""

    def __init__(self, construct: str, position: Optional[int] = None):
        where = f" at offset {position}" if position is not None else ""
        super().__init__(f"unsupported SPARQL feature: {construct}{where}")
        self.construct = construct
        self.position = position


_UNSUPPORTED_KEYWORDS = {
    "GRAPH": "named graphs (GRAPH)",
    "FROM": "dataset clause (FROM)",
    "NAMED": "named graphs (FROM NAMED)",
    "SERVICE": "federation (SERVICE)",
    "MINUS": "negation (MINUS)",
    "EXISTS": "negation (EXISTS)",
    "NOT": "negation (NOT EXISTS)",
    "BIND": "BIND",
    "VALUES": "VALUES",
    "HAVING": "HAVING",
    "CONSTRUCT": "CONSTRUCT query form",
    "ASK": "ASK query form",
    "DESCRIBE": "DESCRIBE query form",
    "REDUCED": "REDUCED",
    "SUM": "aggregate SUM",
    "MIN": "aggregate MIN",
    "MAX": "aggregate MAX",
    "AVG": "aggregate AVG",
    "SAMPLE": "aggregate SAMPLE",
    "GROUP_CONCAT": "aggregate GROUP_CONCAT",
    "INSERT": "update (INSERT)",
    "DELETE": "update (DELETE)",
    "LOAD": "update (LOAD)",
    "CLEAR": "update (CLEAR)",
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\x00-\x20]*>)
  | (?P<var>[?$][A-Za-z0-9_·À-￿]+)
  | (?P<string>"(?:[^"\\\n\r]|\\.)*"|'(?:[^'\\\n\r]|\\.)*')
  | (?P<lang>@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*)
  | (?P<number>[+-]?(?:\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+))
  | (?P<bnode>_:[A-Za-z0-9_]+|\[\s*\])
  | (?P<pname>(?:[A-Za-z][A-Za-z0-9_\-.]*)?:(?:[A-Za-z0-9_][A-Za-z0-9_\-.]*[A-Za-z0-9_\-]|[A-Za-z0-9_])?)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\^\^|&&|\|\||!=|<=|>=|[{}()\[\].;,*+?/^|!=<>])
""", re.X)

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass
class Token:
    kind: str
    text: str
    pos: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(0), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


def _unescape(body: str, pos: int) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            e = body[i + 1]
            if e in _ESCAPES:
                out.append(_ESCAPES[e])
                i += 2
                continue
            if e in "uU":
                width = 4 if e == "u" else 8
                out.append(chr(int(body[i + 2:i + 2 + width], 16)))
                i += 2 + width
                continue
            raise QuerySyntaxError(f"bad escape \\{e}", pos + i)
        out.append(c)
        i += 1
    return "".join(out)


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.base = ""

    # token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise QuerySyntaxError(msg, tok.pos)

    def is_word(self, *words: str) -> bool:
        return self.tok.kind == "word" and self.tok.upper in words

    def is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def expect_op(self, op: str) -> Token:
        if not self.is_op(op):
            self.error(f"expected {op!r}, found {self.tok.text or 'end of query'!r}")
        return self.advance()

    def expect_word(self, word: str) -> Token:
        if not self.is_word(word):
            self.error(f"expected {word}, found {self.tok.text or 'end of query'!r}")
        return self.advance()

    def check_unsupported(self):
        t = self.tok
        if t.kind == "word" and t.upper in _UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeature(_UNSUPPORTED_KEYWORDS[t.upper], t.pos)

    # terms ---------------------------------------------------------------

    def expand_iri(self, tok: Token) -> Term:
        body = tok.text[1:-1]
        if self.base and not re.match(r"[A-Za-z][A-Za-z0-9+.\-]*:", body):
            body = self.base + body
        try:
            return iri(body)
        except ValueError:
            self.error(f"invalid IRI {tok.text}", tok)

    def expand_pname(self, tok: Token) -> Term:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            self.error(f"undeclared prefix {prefix!r}", tok)
        return iri(self.prefixes[prefix] + local)

    def iri_term(self) -> Term:
        t = self.tok
        if t.kind == "iri":
            self.advance()
            return self.expand_iri(t)
        if t.kind == "pname":
            self.advance()
            return self.expand_pname(t)
        self.error("expected an IRI")

    def literal(self) -> Term:
        t = self.advance()
        if t.kind == "number":
            text = t.text
            if re.fullmatch(r"[+-]?\d+", text):
                dt = XSD + "integer"
            elif "e" in text.lower():
                dt = XSD + "double"
            else:
                dt = XSD + "decimal"
            return Term(LITERAL, text, dt)
        if t.kind == "word" and t.text in ("true", "false"):
            return Term(LITERAL, t.text, XSD + "boolean")
        value = _unescape(t.text[1:-1], t.pos + 1)
        if self.tok.kind == "lang":
            lang = self.advance().text[1:]
            return Term(LITERAL, value, None, lang)
        if self.is_op("^^"):
            self.advance()
            return Term(LITERAL, value, self.iri_term().lexical)
        return Term(LITERAL, value)

    def var_or_term(self, allow_literal: bool = True):
        t = self.tok
        if t.kind == "var":
            self.advance()
            return Var(t.text[1:])
        if t.kind in ("iri", "pname"):
            return self.iri_term()
        if t.kind == "bnode":
            raise UnsupportedFeature("blank nodes in query patterns", t.pos)
        if allow_literal and (t.kind in ("string", "number") or (t.kind == "word" and t.text in ("true", "false"))):
            return self.literal()
        if self.is_op("("):
            raise UnsupportedFeature("RDF collections", t.pos)
        self.check_unsupported()
        self.error(f"expected a variable or term, found {t.text or 'end of query'!r}")

    # prologue and query --------------------------------------------------

    def prologue(self):
        while True:
            if self.is_word("PREFIX"):
                self.advance()
                t = self.advance()
                if t.kind != "pname" or not t.text.endswith(":"):
                    self.error("expected prefix name", t)
                ns = self.advance()
                if ns.kind != "iri":
                    self.error("expected namespace IRI", ns)
                self.prefixes[t.text[:-1]] = self.expand_iri(ns).lexical
            elif self.is_word("BASE"):
                self.advance()
                ns = self.advance()
                if ns.kind != "iri":
                    self.error("expected base IRI", ns)
                self.base = ns.text[1:-1]
            else:
                return

    def query(self) -> QueryForm:
        self.prologue()
        self.check_unsupported()
        self.expect_word("SELECT")
        distinct = False
        if self.is_word("DISTINCT"):
            self.advance()
            distinct = True
        self.check_unsupported()
        projection: Optional[list[Projection]] = []
        if self.is_op("*"):
            self.advance()
            projection = None
        else:
            while True:
                if self.tok.kind == "var":
                    projection.append(Projection(Var(self.advance().text[1:])))
                elif self.is_op("("):
                    projection.append(self.aggregate_projection())
                else:
                    break
            if not projection:
                self.error("expected projection")
        self.check_unsupported()
        if self.is_word("WHERE"):
            self.advance()
        if not self.is_op("{"):
            self.check_unsupported()
            self.error("expected '{'")
        where = self.group()
        group_by: list[Var] = []
        order_by: list[OrderKey] = []
        limit = offset = None
        self.check_unsupported()
        if self.is_word("GROUP"):
            self.advance()
            self.expect_word("BY")
            while self.tok.kind == "var":
                group_by.append(Var(self.advance().text[1:]))
            if not group_by:
                self.error("GROUP BY needs at least one variable")
        self.check_unsupported()
        if self.is_word("ORDER"):
            self.advance()
            self.expect_word("BY")
            while True:
                if self.tok.kind == "var":
                    order_by.append(OrderKey(Var(self.advance().text[1:])))
                elif self.is_word("ASC", "DESC"):
                    desc = self.advance().upper == "DESC"
                    self.expect_op("(")
                    t = self.advance()
                    if t.kind != "var":
                        raise UnsupportedFeature("ORDER BY on expressions", t.pos)
                    self.expect_op(")")
                    order_by.append(OrderKey(Var(t.text[1:]), desc))
                else:
                    break
            if not order_by:
                self.error("ORDER BY needs at least one key")
        while self.is_word("LIMIT", "OFFSET"):
            kw = self.advance().upper
            t = self.advance()
            if t.kind != "number" or not t.text.isdigit():
                self.error(f"{kw} needs a non-negative integer", t)
            if kw == "LIMIT":
                limit = int(t.text)
            else:
                offset = int(t.text)
        self.check_unsupported()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after query")
        q = QueryForm(
            projection=tuple(projection) if projection is not None else None,
            where=where,
            distinct=distinct,
            group_by=tuple(group_by),
            order_by=tuple(order_by),
            limit=limit,
            offset=offset,
        )
        _validate(q)
        return q

    def aggregate_projection(self) -> Projection:
        self.expect_op("(")
        self.check_unsupported()
        if not self.is_word("COUNT"):
            self.error("expected COUNT")
        self.advance()
        self.expect_op("(")
        distinct = False
        if self.is_word("DISTINCT"):
            self.advance()
            distinct = True
        if self.is_op("*"):
            self.advance()
            arg = None
        elif self.tok.kind == "var":
            arg = Var(self.advance().text[1:])
        else:
            raise UnsupportedFeature("aggregate over expressions", self.tok.pos)
        self.expect_op(")")
        self.expect_word("AS")
        t = self.advance()
        if t.kind != "var":
            self.error("expected alias variable", t)
        self.expect_op(")")
        return Projection(Var(t.text[1:]), Aggregate("COUNT", arg, distinct))

    # graph patterns ------------------------------------------------------

    def group(self) -> Group:
        self.expect_op("{")
        elements: list = []
        filters: list = []
        atoms: list = []

        def flush():
            if atoms:
                elements.append(BGP(tuple(atoms)))
                atoms.clear()

        while not self.is_op("}"):
            t = self.tok
            if t.kind == "eof":
                self.error("unterminated group")
            self.check_unsupported()
            if self.is_word("SELECT"):
                raise UnsupportedFeature("subquery", t.pos)
            if self.is_word("OPTIONAL"):
                self.advance()
                flush()
                elements.append(OptionalPattern(self.group()))
            elif self.is_word("FILTER"):
                self.advance()
                filters.append(self.filter_constraint())
            elif self.is_op("{"):
                flush()
                first = self.group()
                if self.is_word("UNION"):
                    branches = [first]
                    while self.is_word("UNION"):
                        self.advance()
                        branches.append(self.group())
                    elements.append(UnionPattern(tuple(branches)))
                else:
                    elements.append(first)
            else:
                self.triples_block(atoms)
            if self.is_op("."):
                self.advance()
        self.advance()
        flush()
        return Group(tuple(elements), tuple(filters))

    def triples_block(self, atoms: list):
        subj = self.var_or_term(allow_literal=False)
        while True:
            pred = self.verb()
            while True:
                obj = self.var_or_term()
                atoms.append(_make_atom(subj, pred, obj))
                if self.is_op(","):
                    self.advance()
                    continue
                break
            if self.is_op(";"):
                self.advance()
                if self.is_op(".", "}") or self.is_word("OPTIONAL", "FILTER"):
                    return
                continue
            return

    def verb(self):
        t = self.tok
        if t.kind == "var":
            self.advance()
            return Var(t.text[1:])
        return self.path()

    def path(self) -> Path:
        parts = [self.path_elt_or_inverse()]
        while self.is_op("/"):
            self.advance()
            parts.append(self.path_elt_or_inverse())
        if self.is_op("|"):
            raise UnsupportedFeature("property path alternative (|)", self.tok.pos)
        if len(parts) == 1:
            return parts[0]
        flat = []
        for p in parts:
            flat.extend(p.args if p.kind == SEQUENCE else (p,))
        return Path(SEQUENCE, args=tuple(flat))

    def path_elt_or_inverse(self) -> Path:
        if self.is_op("^"):
            self.advance()
            inner = self.path_elt()
            return inner.inverse() if inner.kind != LINK else Path(INVERSE, args=(inner,))
        return self.path_elt()

    def path_elt(self) -> Path:
        prim = self.path_primary()
        if self.is_op("*", "+", "?"):
            mod = self.advance().text
            kind = {"*": STAR, "+": PLUS, "?": ZERO_OR_ONE}[mod]
            return Path(kind, args=(prim,))
        return prim

    def path_primary(self) -> Path:
        t = self.tok
        if t.kind == "word" and t.text == "a":
            self.advance()
            return Path(LINK, iri=iri(RDF_TYPE))
        if t.kind in ("iri", "pname"):
            return Path(LINK, iri=self.iri_term())
        if self.is_op("("):
            self.advance()
            p = self.path()
            self.expect_op(")")
            return p
        if self.is_op("!"):
            raise UnsupportedFeature("negated property set (!)", t.pos)
        self.check_unsupported()
        self.error(f"expected a predicate, found {t.text or 'end of query'!r}")

    # filters -------------------------------------------------------------

    def filter_constraint(self):
        self.check_unsupported()
        if self.is_word("BOUND"):
            return self.primary_expr()
        if self.is_word("LANG", "LANGMATCHES", "REGEX", "STR", "DATATYPE", "ISIRI", "ISURI",
                        "ISLITERAL", "ISBLANK", "CONTAINS", "STRSTARTS"):
            raise UnsupportedFeature(f"filter function {self.tok.upper}", self.tok.pos)
        self.expect_op("(")
        e = self.or_expr()
        self.expect_op(")")
        return e

    def or_expr(self):
        args = [self.and_expr()]
        while self.is_op("||"):
            self.advance()
            args.append(self.and_expr())
        return args[0] if len(args) == 1 else BoolOp("||", tuple(args))

    def and_expr(self):
        args = [self.unary_expr()]
        while self.is_op("&&"):
            self.advance()
            args.append(self.unary_expr())
        return args[0] if len(args) == 1 else BoolOp("&&", tuple(args))

    def unary_expr(self):
        if self.is_op("!"):
            self.advance()
            return Not(self.unary_expr())
        return self.relational()

    def relational(self):
        if self.is_op("(") or self.is_word("BOUND"):
            return self.primary_expr()
        self.check_unsupported()
        if self.tok.kind == "word" and self.peek().kind == "op" and self.peek().text == "(":
            raise UnsupportedFeature(f"filter function {self.tok.upper}", self.tok.pos)
        left = self.var_or_term()
        if not self.is_op("=", "!=", "<", ">", "<=", ">="):
            if self.is_op("+", "-", "*", "/"):
                raise UnsupportedFeature("arithmetic in filters", self.tok.pos)
            self.error("expected comparison operator")
        op = self.advance().text
        right = self.var_or_term()
        return Compare(op, left, right)

    def primary_expr(self):
        if self.is_word("BOUND"):
            self.advance()
            self.expect_op("(")
            t = self.advance()
            if t.kind != "var":
                self.error("BOUND needs a variable", t)
            self.expect_op(")")
            return Bound(Var(t.text[1:]))
        self.expect_op("(")
        e = self.or_expr()
        self.expect_op(")")
        return e


def _make_atom(s, pred, o):
    if isinstance(pred, Var):
        return TriplePattern(s, pred, o)
    if pred.kind == LINK:
        return TriplePattern(s, pred.iri, o)
    return PathPattern(s, pred, o)


def _validate(q: QueryForm):
    if not iter_atoms(q.where):
        raise QuerySyntaxError("empty graph pattern", 0)
    in_scope = set(pattern_vars(q.where))
    if q.projection is not None:
        aliases = set()
        for p in q.projection:
            if p.aggregate is None:
                if p.var not in in_scope:
                    raise QuerySyntaxError(f"projected variable ?{p.var.name} does not occur in the pattern", 0)
            else:
                if p.aggregate.arg is not None and p.aggregate.arg not in in_scope:
                    raise QuerySyntaxError(f"aggregated variable ?{p.aggregate.arg.name} does not occur", 0)
                aliases.add(p.var)
        if q.has_aggregate:
            for p in q.projection:
                if p.aggregate is None and p.var not in q.group_by:
                    raise QuerySyntaxError(f"?{p.var.name} is neither grouped nor aggregated", 0)
    for v in q.group_by:
        if v not in in_scope:
            raise QuerySyntaxError(f"GROUP BY variable ?{v.name} does not occur", 0)


def parse_query(text: str) -> QueryForm:
    return Parser(text).query()


# --------------------------------------------------------------------------
# printing


def _node(n) -> str:
    if isinstance(n, Var):
        return "?" + n.name
    return n.n3()


def format_path(p: Path) -> str:
    if p.kind == LINK:
        return p.iri.n3()
    if p.kind == INVERSE:
        return "^" + _wrap(p.args[0])
    if p.kind == SEQUENCE:
        return "/".join(_wrap(a) for a in p.args)
    mod = {PLUS: "+", STAR: "*", ZERO_OR_ONE: "?"}[p.kind]
    return _wrap(p.args[0]) + mod


def _wrap(p: Path) -> str:
    return format_path(p) if p.kind == LINK else "(" + format_path(p) + ")"


def format_expr(e) -> str:
    if isinstance(e, Compare):
        return f"{_node(e.left)} {e.op} {_node(e.right)}"
    if isinstance(e, Bound):
        return f"BOUND(?{e.var.name})"
    if isinstance(e, Not):
        return f"!({format_expr(e.arg)})"
    return "(" + f" {e.op} ".join(format_expr(a) if not isinstance(a, BoolOp) else "(" + format_expr(a) + ")"
                                  for a in e.args) + ")"


def _format_group(g: Group, indent: int) -> list[str]:
    pad = "  " * indent
    lines = [pad + "{"]
    for el in g.elements:
        if isinstance(el, BGP):
            for a in el.atoms:
                pred = format_path(a.path) if isinstance(a, PathPattern) else _node(a.p)
                lines.append(f"{pad}  {_node(a.s)} {pred} {_node(a.o)} .")
        elif isinstance(el, OptionalPattern):
            sub = _format_group(el.group, indent + 1)
            sub[0] = pad + "  OPTIONAL " + sub[0].lstrip()
            lines.extend(sub)
        elif isinstance(el, UnionPattern):
            for k, b in enumerate(el.branches):
                sub = _format_group(b, indent + 1)
                if k:
                    sub[0] = pad + "  UNION " + sub[0].lstrip()
                lines.extend(sub)
        else:
            lines.extend(_format_group(el, indent + 1))
    for f in g.filters:
        lines.append(f"{pad}  FILTER ({format_expr(f)})")
    lines.append(pad + "}")
    return lines


def format_query(q: QueryForm) -> str:
    head = "SELECT "
    if q.distinct:
        head += "DISTINCT "
    if q.projection is None:
        head += "*"
    else:
        parts = []
        for p in q.projection:
            if p.aggregate is None:
                parts.append(_node(p.var))
            else:
                a = p.aggregate
                inner = ("DISTINCT " if a.distinct else "") + (_node(a.arg) if a.arg else "*")
                parts.append(f"({a.func}({inner}) AS {_node(p.var)})")
        head += " ".join(parts)
    lines = [head + " WHERE"] + _format_group(q.where, 0)
    if q.group_by:
        lines.append("GROUP BY " + " ".join(_node(v) for v in q.group_by))
    if q.order_by:
        lines.append("ORDER BY " + " ".join(
            f"DESC({_node(k.var)})" if k.descending else _node(k.var) for k in q.order_by))
    if q.limit is not None:
        lines.append(f"LIMIT {q.limit}")
    if q.offset is not None:
        lines.append(f"OFFSET {q.offset}")
    return "\n".join(lines) + "\n"

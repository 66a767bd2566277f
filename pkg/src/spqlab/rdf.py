"""Terms, triples, dictionary encoding and streaming N-Triples I/O."""

from __future__ import annotations

import gzip
import io
import re
import threading
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, NamedTuple, Optional

IRI = "iri"
BNODE = "bnode"
LITERAL = "literal"

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
XSD = "http://www.w3.org/2001/XMLSchema#"

_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')


@dataclass(frozen=True)
class Term:
    kind: str
    lexical: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.kind == IRI:
            if not self.lexical or _IRI_FORBIDDEN.search(self.lexical):
                raise ValueError(f"invalid IRI: {self.lexical!r}")
        elif self.kind == BNODE:
            if not self.lexical:
                raise ValueError("empty blank node label")
        elif self.kind == LITERAL:
            if self.datatype is not None and self.language is not None:
                raise ValueError("literal cannot carry both datatype and language")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")
        if self.kind != LITERAL and (self.datatype or self.language):
            raise ValueError("only literals carry datatype or language")

    def n3(self) -> str:
        """N-Triples rendering of the term."""
        if self.kind == IRI:
            return f"<{self.lexical}>"
        if self.kind == BNODE:
            return f"_:{self.lexical}"
        out = '"' + _escape_literal(self.lexical) + '"'
        if self.language:
            out += "@" + self.language
        elif self.datatype:
            out += f"^^<{self.datatype}>"
        return out

    def __str__(self):
        return self.n3()


def iri(value: str) -> Term:
    return Term(IRI, value)


def bnode(label: str) -> Term:
    return Term(BNODE, label)


def literal(value: str, datatype: Optional[str] = None, language: Optional[str] = None) -> Term:
    return Term(LITERAL, value, datatype, language)


class Triple(NamedTuple):
    subject: Term
    predicate: Term
    object: Term

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


def make_triple(s: Term, p: Term, o: Term) -> Triple:
    if p.kind != IRI:
        raise ValueError("predicate must be an IRI")
    if s.kind == LITERAL:
        raise ValueError("subject cannot be a literal")
    return Triple(s, p, o)


class EncodedTriple(NamedTuple):
    s: int
    p: int
    o: int


class UnknownId(KeyError):
    pass


class NTriplesError(SyntaxError):
    """Malformed N-Triples input, with line number and byte offset."""

    def __init__(self, message: str, line_no: int, offset: int):
        super().__init__(f"line {line_no}, byte {offset}: {message}")
        self.line_no = line_no
        self.byte_offset = offset
        self.reason = message


class Dictionary:
    """Dense bijective term <-> id map; ids are handed out in first-seen order."""

    def __init__(self):
        self._ids: dict[Term, int] = {}
        self._terms: list[Term] = []
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._terms)

    def __contains__(self, term):
        return term in self._ids

    @property
    def next_id(self) -> int:
        return len(self._terms)

    def intern(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is not None:
            return tid
        with self._lock:
            tid = self._ids.get(term)
            if tid is None:
                tid = len(self._terms)
                self._terms.append(term)
                self._ids[term] = tid
            return tid

    def lookup(self, term: Term) -> Optional[int]:
        return self._ids.get(term)

    def term(self, tid: int) -> Term:
        if not 0 <= tid < len(self._terms):
            raise UnknownId(tid)
        return self._terms[tid]


def encode(t: Triple, d: Dictionary) -> EncodedTriple:
    return EncodedTriple(d.intern(t.subject), d.intern(t.predicate), d.intern(t.object))


def decode(e: EncodedTriple, d: Dictionary) -> Triple:
    return Triple(d.term(e[0]), d.term(e[1]), d.term(e[2]))


# --------------------------------------------------------------------------
# parsing

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_FAST_IRI = re.compile(r'<([^\x00-\x20<>"{}|^`\\]+)>')
_FAST_LITERAL = re.compile(r'"([^"\\\n\r]*)"')
_LANG = re.compile(r"[a-zA-Z]+(-[a-zA-Z0-9]+)*")
_BNODE_LABEL = re.compile(r"[A-Za-z0-9_\u00C0-\U000EFFFF]([A-Za-z0-9_\-.\u00B7\u00C0-\U000EFFFF]*[A-Za-z0-9_\-\u00B7\u00C0-\U000EFFFF])?")


class _LineParser:
    def __init__(self, line: str, line_no: int):
        self.s = line
        self.i = 0
        self.line_no = line_no

    def error(self, msg: str, pos: Optional[int] = None):
        pos = self.i if pos is None else pos
        raise NTriplesError(msg, self.line_no, len(self.s[:pos].encode("utf-8")))

    def ws(self):
        s, i = self.s, self.i
        while i < len(s) and s[i] in " \t":
            i += 1
        self.i = i

    def uchar(self, start: int) -> tuple[str, int]:
        # start points at 'u' or 'U'
        width = 4 if self.s[start] == "u" else 8
        digits = self.s[start + 1:start + 1 + width]
        if len(digits) != width or not all(c in "0123456789abcdefABCDEF" for c in digits):
            self.error("bad unicode escape", start - 1)
        return chr(int(digits, 16)), start + 1 + width

    def iriref(self) -> str:
        s = self.s
        if self.i >= len(s) or s[self.i] != "<":
            self.error("expected '<'")
        m = _FAST_IRI.match(s, self.i)
        if m:
            self.i = m.end()
            return m.group(1)
        i = self.i + 1
        out = []
        while True:
            if i >= len(s):
                self.error("unterminated IRI")
            c = s[i]
            if c == ">":
                break
            if c == "\\":
                if i + 1 < len(s) and s[i + 1] in "uU":
                    ch, i = self.uchar(i + 1)
                    out.append(ch)
                    continue
                self.error("bad escape in IRI", i)
            if c in ' <"{}|^`' or ord(c) <= 0x20:
                self.error(f"illegal character {c!r} in IRI", i)
            out.append(c)
            i += 1
        self.i = i + 1
        value = "".join(out)
        if not value:
            self.error("empty IRI")
        return value

    def bnode(self) -> str:
        if not self.s.startswith("_:", self.i):
            self.error("expected blank node")
        m = _BNODE_LABEL.match(self.s, self.i + 2)
        if not m:
            self.error("bad blank node label")
        self.i = m.end()
        return m.group(0)

    def literal(self) -> Term:
        s = self.s
        m = _FAST_LITERAL.match(s, self.i)
        if m:
            self.i = m.end()
            return self.literal_suffix(m.group(1))
        i = self.i + 1
        out = []
        while True:
            if i >= len(s):
                self.error("unterminated literal")
            c = s[i]
            if c == '"':
                break
            if c == "\\":
                if i + 1 >= len(s):
                    self.error("bad escape", i)
                e = s[i + 1]
                if e in "uU":
                    ch, i = self.uchar(i + 1)
                    out.append(ch)
                    continue
                if e not in _ECHAR:
                    self.error(f"bad escape \\{e}", i)
                out.append(_ECHAR[e])
                i += 2
                continue
            if c in "\n\r":
                self.error("raw newline in literal", i)
            out.append(c)
            i += 1
        self.i = i + 1
        return self.literal_suffix("".join(out))

    def literal_suffix(self, value: str) -> Term:
        s = self.s
        if s.startswith("@", self.i):
            m = _LANG.match(s, self.i + 1)
            if not m:
                self.error("bad language tag")
            self.i = m.end()
            return Term(LITERAL, value, None, m.group(0))
        if s.startswith("^^", self.i):
            self.i += 2
            return Term(LITERAL, value, self.iriref(), None)
        return Term(LITERAL, value)

    def subject(self) -> Term:
        if self.s.startswith("<", self.i):
            return Term(IRI, self.iriref())
        if self.s.startswith("_:", self.i):
            return Term(BNODE, self.bnode())
        self.error("expected IRI or blank node as subject")

    def object(self) -> Term:
        if self.s.startswith("<", self.i):
            return Term(IRI, self.iriref())
        if self.s.startswith("_:", self.i):
            return Term(BNODE, self.bnode())
        if self.s.startswith('"', self.i):
            return self.literal()
        self.error("expected IRI, blank node or literal as object")

    def triple(self) -> Triple:
        s = self.subject()
        self.ws()
        if not self.s.startswith("<", self.i):
            self.error("expected IRI as predicate")
        p = Term(IRI, self.iriref())
        self.ws()
        o = self.object()
        self.ws()
        if not self.s.startswith(".", self.i):
            self.error("missing terminating '.'")
        self.i += 1
        self.ws()
        if self.i < len(self.s) and self.s[self.i] != "#":
            self.error("trailing garbage after '.'")
        return Triple(s, p, o)


def parse_line(line: str, line_no: int = 1) -> Optional[Triple]:
    """Parse one physical line; blank and comment lines give ``None``."""
    line = line.rstrip("\r\n")
    stripped = line.lstrip(" \t")
    if not stripped or stripped.startswith("#"):
        return None
    p = _LineParser(line, line_no)
    p.ws()
    try:
        return p.triple()
    except ValueError as exc:
        if isinstance(exc, NTriplesError):
            raise
        raise NTriplesError(str(exc), line_no, len(line[:p.i].encode("utf-8"))) from None


@dataclass
class ParseErrors:
    """Errors recorded under the skip-and-count policy."""

    errors: list[NTriplesError] = field(default_factory=list)

    def __len__(self):
        return len(self.errors)


def _maybe_gunzip(source: BinaryIO) -> BinaryIO:
    if not hasattr(source, "peek"):
        source = io.BufferedReader(source)
    if source.peek(2)[:2] == b"\x1f\x8b":
        return gzip.GzipFile(fileobj=source)
    return source


def parse_stream(source: BinaryIO, fail_fast: bool = False,
                 errors: Optional[ParseErrors] = None) -> Iterator[tuple[Triple, int]]:
    """Yield ``(triple, line_no)`` pairs in document order.

    Malformed lines raise when ``fail_fast`` is set, otherwise they are
    skipped and appended to ``errors``.
    """
    source = _maybe_gunzip(source)
    for line_no, raw in enumerate(source, start=1):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            err = NTriplesError("invalid UTF-8", line_no, exc.start)
            if fail_fast:
                raise err from None
            if errors is not None:
                errors.errors.append(err)
            continue
        try:
            t = parse_line(text, line_no)
        except NTriplesError as err:
            if fail_fast:
                raise
            if errors is not None:
                errors.errors.append(err)
            continue
        if t is not None:
            yield t, line_no


def _escape_literal(value: str) -> str:
    return (value.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\r", "\\r"))


def write_stream(triples: Iterable[Triple], sink: BinaryIO) -> int:
    n = 0
    for t in triples:
        sink.write(t.n3().encode("utf-8"))
        sink.write(b"\n")
        n += 1
    return n


# --------------------------------------------------------------------------
# datasets


@dataclass
class Dataset:
    """An encoded triple list plus the dictionary it was encoded with."""

    triples: list[EncodedTriple]
    dictionary: Dictionary

    @classmethod
    def from_triples(cls, triples: Iterable[Triple], dictionary: Optional[Dictionary] = None) -> "Dataset":
        d = dictionary if dictionary is not None else Dictionary()
        return cls([encode(t, d) for t in triples], d)

    def __len__(self):
        return len(self.triples)

    def decoded(self) -> Iterator[Triple]:
        for e in self.triples:
            yield decode(e, self.dictionary)

    def subset(self, triples: list[EncodedTriple]) -> "Dataset":
        """Same dictionary, different triple list."""
        return Dataset(triples, self.dictionary)

    def id_of(self, term: Term) -> Optional[int]:
        return self.dictionary.lookup(term)


def load_ntriples(path, fail_fast: bool = False, errors: Optional[ParseErrors] = None) -> Dataset:
    d = Dictionary()
    with open(path, "rb") as fh:
        triples = [encode(t, d) for t, _ in parse_stream(fh, fail_fast=fail_fast, errors=errors)]
    return Dataset(triples, d)


def save_ntriples(dataset: Dataset, path) -> int:
    with open(path, "wb") as fh:
        return write_stream(dataset.decoded(), fh)

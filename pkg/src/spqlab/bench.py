"""Measurement protocol: repeated timed runs, digests and cross-variant checks."""

from __future__ import annotations

import hashlib
import statistics
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence
from urllib.parse import urlparse

import requests

from .rdf import BNODE, IRI, LITERAL, Dataset, Term, load_ntriples
from .sparql.parser import QuerySyntaxError, UnsupportedFeature
from .store.evaluate import EvalOptions, evaluate
from .store.index import IndexedStore, load
from .store.table import QueryTimeout

DEFAULT_TIMEOUT_MS = 5000.0
DEFAULT_REPEATS = 5
RESULTS_JSON = "application/sparql-results+json"


class TransportError(RuntimeError):
    pass


class MalformedResponse(ValueError):
    pass


class EndpointKind(str, Enum):
    BUILTIN = "builtin"
    HTTP = "http"


@dataclass(frozen=True)
class EndpointSpec:
    """A query target.  Http URLs may contain ``{variant}``, filled per dataset variant."""

    label: str
    kind: EndpointKind = EndpointKind.BUILTIN
    url: Optional[str] = None
    timeout_ms: float = DEFAULT_TIMEOUT_MS
    options: EvalOptions = EvalOptions()

    def __post_init__(self):
        object.__setattr__(self, "kind", EndpointKind(self.kind))
        if not self.label:
            raise ValueError("endpoint label must be nonempty")
        if self.kind == EndpointKind.HTTP:
            if not self.url:
                raise ValueError(f"http endpoint {self.label!r} needs a URL")
            parsed = urlparse(self.url.replace("{variant}", "v"))
            if parsed.scheme not in ("http", "https") or not parsed.netloc:
                raise ValueError(f"invalid endpoint URL {self.url!r}")

    def url_for(self, variant: Optional[str]) -> str:
        return self.url.replace("{variant}", variant or "")


@dataclass
class ResultSet:
    variables: tuple[str, ...]
    rows: list[tuple[Optional[Term], ...]]

    def __len__(self):
        return len(self.rows)


def _canonical_row(variables, row) -> str:
    cells = sorted(f"{v}={t.n3()}" for v, t in zip(variables, row) if t is not None)
    return "\t".join(cells)


def digest(result: ResultSet) -> str:
    """Order-insensitive hash of the row multiset (rows and columns both)."""
    lines = sorted(_canonical_row(result.variables, r) for r in result.rows)
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def gmean(times: Sequence[float]) -> float:
    if not times:
        raise ValueError("geometric mean of no run times")
    if any(t <= 0 for t in times):
        # sub-resolution timings: clamp so the log stays finite
        times = [max(t, 1e-6) for t in times]
    return statistics.geometric_mean(times)


# --------------------------------------------------------------------------
# SPARQL JSON results


def _term_from_json(cell: dict) -> Term:
    try:
        kind = cell["type"]
        value = cell["value"]
    except (KeyError, TypeError) as exc:
        raise MalformedResponse(f"binding cell without type/value: {cell!r}") from exc
    if kind == "uri":
        return Term(IRI, value)
    if kind == "bnode":
        return Term(BNODE, value)
    if kind in ("literal", "typed-literal"):
        lang = cell.get("xml:lang")
        dt = cell.get("datatype")
        if lang:
            return Term(LITERAL, value, None, lang)
        return Term(LITERAL, value, dt)
    raise MalformedResponse(f"unknown binding type {kind!r}")


def parse_results_json(doc) -> ResultSet:
    try:
        variables = tuple(doc["head"]["vars"])
        bindings = doc["results"]["bindings"]
    except (KeyError, TypeError) as exc:
        raise MalformedResponse("not a SPARQL JSON results document") from exc
    if not isinstance(bindings, list):
        raise MalformedResponse("results.bindings is not a list")
    rows = []
    for b in bindings:
        if not isinstance(b, dict):
            raise MalformedResponse(f"binding is not an object: {b!r}")
        unknown = set(b) - set(variables)
        if unknown:
            raise MalformedResponse(f"binding uses undeclared variables {sorted(unknown)}")
        rows.append(tuple(_term_from_json(b[v]) if v in b else None for v in variables))
    return ResultSet(variables, rows)


def _http_query(url: str, query: str, timeout_ms: float, session=None) -> ResultSet:
    post = (session or requests).post
    try:
        resp = post(url, data={"query": query}, headers={"Accept": RESULTS_JSON},
                    timeout=timeout_ms / 1000.0)
    except requests.exceptions.Timeout as exc:
        raise QueryTimeout(f"no answer from {url} within {timeout_ms:.0f} ms") from exc
    except requests.exceptions.RequestException as exc:
        raise TransportError(f"request to {url} failed: {exc}") from exc
    if resp.status_code != 200:
        raise TransportError(f"{url} answered HTTP {resp.status_code}: {resp.text[:200]}")
    try:
        doc = resp.json()
    except ValueError as exc:
        raise MalformedResponse(f"{url} did not return JSON") from exc
    return parse_results_json(doc)


def run_query(endpoint: EndpointSpec, query: str, timeout_ms: Optional[float] = None,
              store: Optional[IndexedStore] = None, variant: Optional[str] = None,
              session=None) -> tuple[float, ResultSet]:
    """One timed execution from submission to fully consumed result.

    Raises :class:`QueryTimeout` past ``timeout_ms``.
    """
    timeout_ms = endpoint.timeout_ms if timeout_ms is None else timeout_ms
    t0 = time.perf_counter()
    if endpoint.kind == EndpointKind.BUILTIN:
        if store is None:
            raise ValueError("builtin endpoint needs a loaded store")
        res = evaluate(store, query, replace(endpoint.options, timeout_ms=timeout_ms))
        result = ResultSet(tuple(res.variables), res.rows)
    else:
        result = _http_query(endpoint.url_for(variant), query, timeout_ms, session)
    elapsed = (time.perf_counter() - t0) * 1000.0
    if elapsed > timeout_ms:
        raise QueryTimeout(f"run took {elapsed:.0f} ms, limit {timeout_ms:.0f} ms")
    return elapsed, result


# --------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class DatasetVariant:
    """One generated dataset.  The id is ``<size class>/<structuredness class>``."""

    size_class: str
    structuredness: str
    path: Optional[str] = None
    dataset: Optional[Dataset] = None

    @property
    def id(self) -> str:
        return f"{self.size_class}/{self.structuredness}"


def split_variant(variant_id: str) -> tuple[str, str]:
    size, _, struct = variant_id.partition("/")
    return size, struct


@dataclass
class BenchmarkRecord:
    variant: str
    query: str
    engine: str
    run_times_ms: list[Optional[float]] = field(default_factory=list)
    timed_out: bool = False
    rows: Optional[int] = None
    digest: Optional[str] = None
    error: Optional[str] = None

    @property
    def gmean_ms(self) -> Optional[float]:
        if self.timed_out or self.error or not self.run_times_ms:
            return None
        if any(t is None for t in self.run_times_ms):
            return None
        return gmean(self.run_times_ms)

    @property
    def size_class(self) -> str:
        return split_variant(self.variant)[0]

    @property
    def structuredness(self) -> str:
        return split_variant(self.variant)[1]

    @property
    def ok(self) -> bool:
        return self.error is None and not self.timed_out


def run_cell(endpoint: EndpointSpec, variant_id: str, query_id: str, query: str,
             repeats: int = DEFAULT_REPEATS, timeout_ms: Optional[float] = None,
             store: Optional[IndexedStore] = None, session=None) -> BenchmarkRecord:
    """Back-to-back runs of one query; the first timeout ends the cell."""
    rec = BenchmarkRecord(variant_id, query_id, endpoint.label)
    last = None
    for _ in range(repeats):
        try:
            ms, last = run_query(endpoint, query, timeout_ms, store, variant_id, session)
        except QueryTimeout:
            rec.timed_out = True
            rec.run_times_ms.append(None)
            break
        except (TransportError, MalformedResponse, UnsupportedFeature, QuerySyntaxError) as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
            break
        rec.run_times_ms.append(ms)
    if rec.ok and last is not None:
        rec.rows = len(last)
        rec.digest = digest(last)
    return rec


def run_suite(endpoints: Sequence[EndpointSpec], variants: Sequence[DatasetVariant],
              queries: dict[str, str], repeats: int = DEFAULT_REPEATS,
              timeout_ms: Optional[float] = None, cold: bool = False,
              progress: Optional[Callable[[BenchmarkRecord], None]] = None) -> list[BenchmarkRecord]:
    """Every (variant, query, endpoint) cell, sequentially per endpoint.

    Builtin stores are loaded once per variant, outside the timed region.
    With ``cold`` the store is rebuilt before every run.
    """
    labels = [e.label for e in endpoints]
    if len(set(labels)) != len(labels):
        raise ValueError("endpoint labels must be unique")
    records = []
    for ep in endpoints:
        session = requests.Session() if ep.kind == EndpointKind.HTTP else None
        for var in variants:
            store = None
            if ep.kind == EndpointKind.BUILTIN and not cold:
                store = _load_variant(var)
            for qid, text in queries.items():
                if cold and ep.kind == EndpointKind.BUILTIN:
                    rec = _cold_cell(ep, var, qid, text, repeats, timeout_ms)
                else:
                    rec = run_cell(ep, var.id, qid, text, repeats, timeout_ms, store, session)
                records.append(rec)
                if progress is not None:
                    progress(rec)
        if session is not None:
            session.close()
    return records


def _cold_cell(ep, var, qid, text, repeats, timeout_ms):
    rec = BenchmarkRecord(var.id, qid, ep.label)
    last = None
    for _ in range(repeats):
        store = _load_variant(var)
        try:
            ms, last = run_query(ep, text, timeout_ms, store, var.id)
        except QueryTimeout:
            rec.timed_out = True
            rec.run_times_ms.append(None)
            break
        except (UnsupportedFeature, QuerySyntaxError) as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
            break
        rec.run_times_ms.append(ms)
    if rec.ok and last is not None:
        rec.rows, rec.digest = len(last), digest(last)
    return rec


def _load_variant(var: DatasetVariant) -> IndexedStore:
    if var.dataset is not None:
        return load(var.dataset)
    if var.path is None:
        raise ValueError(f"variant {var.id} has neither a dataset nor a path")
    return load(load_ntriples(var.path))


# --------------------------------------------------------------------------
# equivalence


@dataclass
class Violation:
    query: str
    engine: str
    variant_a: str
    variant_b: str
    digest_a: str
    digest_b: str


@dataclass
class EquivalenceReport:
    groups: int = 0
    violations: list[Violation] = field(default_factory=list)
    unverified: list[tuple[str, str, str]] = field(default_factory=list)   # (query, engine, variant)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_equivalence(records: Iterable[BenchmarkRecord], by_size: bool = True) -> EquivalenceReport:
    """Compare digests of each query across structuredness variants.

    Groups are (query, engine) and, with ``by_size``, the size class.  Every
    differing variant pair against the group's first variant is reported.
    """
    groups: dict[tuple, list[BenchmarkRecord]] = {}
    report = EquivalenceReport()
    for r in records:
        if not r.ok or r.digest is None:
            report.unverified.append((r.query, r.engine, r.variant))
            continue
        key = (r.query, r.engine, r.size_class if by_size else "")
        groups.setdefault(key, []).append(r)
    report.groups = len(groups)
    for (q, eng, _), members in sorted(groups.items()):
        members = sorted(members, key=lambda r: r.variant)
        ref = members[0]
        for other in members[1:]:
            if other.digest != ref.digest:
                report.violations.append(Violation(q, eng, ref.variant, other.variant,
                                                   ref.digest, other.digest))
    return report


# --------------------------------------------------------------------------
# axis codes

_LEVELS = {"low": "0", "high": "1"}


def cell_code(size_class: str, structuredness: str) -> str:
    """``[00]`` is low size and low structuredness; the first digit is size."""
    try:
        return f"[{_LEVELS[size_class]}{_LEVELS[structuredness]}]"
    except KeyError as exc:
        raise ValueError(f"no axis code for ({size_class}, {structuredness})") from exc


def parse_cell(code: str) -> tuple[str, str]:
    inv = {v: k for k, v in _LEVELS.items()}
    if len(code) != 4 or code[0] != "[" or code[3] != "]" or code[1] not in inv or code[2] not in inv:
        raise ValueError(f"bad axis code {code!r}")
    return inv[code[1]], inv[code[2]]


CELL_CODES = ("[00]", "[01]", "[10]", "[11]")


@dataclass(frozen=True)
class SPQCell:
    size_class: str
    structuredness: str

    @property
    def code(self) -> str:
        if self.size_class in _LEVELS and self.structuredness in _LEVELS:
            return cell_code(self.size_class, self.structuredness)
        return f"{self.size_class}/{self.structuredness}"

    @classmethod
    def from_code(cls, code: str) -> "SPQCell":
        return cls(*parse_cell(code))

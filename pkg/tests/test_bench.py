import json
import math
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs

import pytest
from hypothesis import given, settings, strategies as st

from spqlab import bench
from spqlab.bench import (
    BenchmarkRecord,
    DatasetVariant,
    EndpointKind,
    EndpointSpec,
    MalformedResponse,
    ResultSet,
    SPQCell,
    TransportError,
    cell_code,
    digest,
    gmean,
    parse_cell,
    parse_results_json,
    run_cell,
    run_query,
    run_suite,
    verify_equivalence,
)
from spqlab.rdf import IRI, LITERAL, Term, iri, literal
from spqlab.store.table import QueryTimeout

from conftest import ex

P = "PREFIX e: <http://ex/> "


# geometric mean ---------------------------------------------------------------------


def test_gmean_constant():
    assert gmean([100.0] * 5) == pytest.approx(100.0)


def test_gmean_two_decades():
    assert gmean([10.0, 1000.0]) == pytest.approx(100.0)


def test_gmean_empty():
    with pytest.raises(ValueError):
        gmean([])


@settings(max_examples=100)
@given(st.lists(st.floats(0.01, 1e5), min_size=1, max_size=8))
def test_gmean_bounds(times):
    g = gmean(times)
    assert min(times) * (1 - 1e-9) <= g <= max(times) * (1 + 1e-9)
    assert g == pytest.approx(math.exp(sum(map(math.log, times)) / len(times)), rel=1e-9)


def test_timeout_cell_has_no_gmean():
    rec = BenchmarkRecord("low/0.1", "q", "e", [12.0, None], timed_out=True)
    assert rec.gmean_ms is None and not rec.ok
    assert BenchmarkRecord("low/0.1", "q", "e", [10.0, 1000.0]).gmean_ms == pytest.approx(100.0)


# digests -------------------------------------------------------------------------------

A, B = iri("http://ex/a"), iri("http://ex/b")


def test_digest_ignores_row_and_column_order():
    r1 = ResultSet(("x", "y"), [(A, B), (B, None)])
    r2 = ResultSet(("y", "x"), [(None, B), (B, A)])
    assert digest(r1) == digest(r2)


def test_digest_sensitive():
    base = ResultSet(("x",), [(A,), (B,)])
    assert digest(base) != digest(ResultSet(("x",), [(A,)]))
    assert digest(base) != digest(ResultSet(("x",), [(A,), (B,), (B,)]))
    assert digest(base) != digest(ResultSet(("y",), [(A,), (B,)]))
    assert digest(ResultSet(("x",), [(literal("1"),)])) != digest(ResultSet(("x",), [(literal("1", "http://www.w3.org/2001/XMLSchema#integer"),)]))


@settings(max_examples=60)
@given(st.lists(st.tuples(st.sampled_from([A, B, None]), st.sampled_from([A, B, None])), max_size=10), st.randoms())
def test_digest_permutation_invariant(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    assert digest(ResultSet(("x", "y"), rows)) == digest(ResultSet(("x", "y"), shuffled))


# JSON results ----------------------------------------------------------------------------


def test_parse_results_json():
    doc = {"head": {"vars": ["x", "n"]}, "results": {"bindings": [
        {"x": {"type": "uri", "value": "http://ex/a"}, "n": {"type": "literal", "value": "3",
                                                            "datatype": "http://www.w3.org/2001/XMLSchema#integer"}},
        {"x": {"type": "literal", "value": "chat", "xml:lang": "fr"}},
    ]}}
    rs = parse_results_json(doc)
    assert rs.variables == ("x", "n")
    assert rs.rows[0][0] == Term(IRI, "http://ex/a")
    assert rs.rows[0][1].datatype.endswith("#integer")
    assert rs.rows[1] == (Term(LITERAL, "chat", None, "fr"), None)


@pytest.mark.parametrize("doc", [
    {},
    {"head": {"vars": ["x"]}},
    {"head": {"vars": ["x"]}, "results": {"bindings": {}}},
    {"head": {"vars": ["x"]}, "results": {"bindings": [{"y": {"type": "uri", "value": "u"}}]}},
    {"head": {"vars": ["x"]}, "results": {"bindings": [{"x": {"type": "weird", "value": "u"}}]}},
    {"head": {"vars": ["x"]}, "results": {"bindings": [{"x": {"value": "u"}}]}},
])
def test_malformed(doc):
    with pytest.raises(MalformedResponse):
        parse_results_json(doc)


# HTTP endpoints -----------------------------------------------------------------------------

RESULT = {"head": {"vars": ["x"]}, "results": {"bindings": [{"x": {"type": "uri", "value": "http://ex/a"}}]}}


class _Handler(BaseHTTPRequestHandler):
    delay = 0.0

    def do_POST(self):
        body = self.rfile.read(int(self.headers.get("Content-Length", 0))).decode()
        query = parse_qs(body).get("query", [""])[0]
        time.sleep(self.server.delay)
        if "broken" in query:
            payload, status = b"not json", 200
        elif "fail" in query:
            payload, status = b"boom", 500
        else:
            payload, status = json.dumps(RESULT).encode(), 200
        self.send_response(status)
        self.send_header("Content-Type", bench.RESULTS_JSON)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        try:
            self.wfile.write(payload)
        except (BrokenPipeError, ConnectionResetError):
            pass

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    srv = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    srv.delay = 0.0
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def _ep(server, timeout_ms=2000.0):
    return EndpointSpec("stub", EndpointKind.HTTP, f"http://127.0.0.1:{server.server_address[1]}/{{variant}}/sparql",
                        timeout_ms)


def test_http_round_trip(server):
    ms, rs = run_query(_ep(server), "SELECT ?x WHERE { ?x ?p ?o }", variant="low")
    assert ms > 0 and rs.rows == [(iri("http://ex/a"),)]


def test_http_errors(server):
    with pytest.raises(TransportError):
        run_query(_ep(server), "fail")
    with pytest.raises(MalformedResponse):
        run_query(_ep(server), "broken")


def test_http_timeout_cell(server):
    server.delay = 0.4
    rec = run_cell(_ep(server, timeout_ms=100.0), "low/0.1", "q", "SELECT * WHERE { ?s ?p ?o }", repeats=5)
    assert rec.timed_out and rec.run_times_ms == [None]
    assert rec.gmean_ms is None and rec.digest is None


def test_unreachable_endpoint():
    ep = EndpointSpec("dead", EndpointKind.HTTP, "http://127.0.0.1:9/sparql", 1000.0)
    with pytest.raises(TransportError):
        run_query(ep, "SELECT * WHERE { ?s ?p ?o }")
    rec = run_cell(ep, "low/0.1", "q", "SELECT * WHERE { ?s ?p ?o }")
    assert rec.error and "TransportError" in rec.error


def test_endpoint_validation():
    with pytest.raises(ValueError):
        EndpointSpec("x", EndpointKind.HTTP)
    with pytest.raises(ValueError):
        EndpointSpec("x", EndpointKind.HTTP, "ftp://host/sparql")
    with pytest.raises(ValueError):
        EndpointSpec("")


# built-in cells -------------------------------------------------------------------------------


def test_builtin_cell(intro_store):
    rec = run_cell(EndpointSpec("builtin"), "low/0.5", "q1", P + "SELECT ?x WHERE { ?x e:instance_of ?t }",
                   store=intro_store)
    assert len(rec.run_times_ms) == 5 and all(t > 0 for t in rec.run_times_ms)
    assert rec.rows == 3 and rec.gmean_ms > 0 and rec.digest


def test_builtin_timeout_cell():
    from spqlab.rdf import Dataset, Triple
    from spqlab.store.index import load
    store = load(Dataset.from_triples([Triple(iri(f"http://t/s{i}"), iri("http://t/p"), iri(f"http://t/o{i}"))
                                       for i in range(300)]))
    q = "SELECT * WHERE { ?a <http://t/p> ?b . ?c <http://t/p> ?d . ?e <http://t/p> ?f }"
    rec = run_cell(EndpointSpec("builtin"), "low/0.5", "slow", q, timeout_ms=30.0, store=store)
    assert rec.timed_out and rec.gmean_ms is None and rec.rows is None


def test_unsupported_query_is_error_cell(intro_store):
    rec = run_cell(EndpointSpec("builtin"), "low/0.5", "bad", "ASK { ?s ?p ?o }", store=intro_store)
    assert rec.error and rec.error.startswith("UnsupportedFeature")


def test_run_suite(intro):
    variants = [DatasetVariant("low", "0.5", dataset=intro), DatasetVariant("low", "0.9", dataset=intro)]
    queries = {"q1": P + "SELECT ?x WHERE { ?x e:instance_of ?t }", "q2": P + "SELECT * WHERE { ?x e:located_in+ ?y }"}
    seen = []
    recs = run_suite([EndpointSpec("builtin")], variants, queries, repeats=3, progress=seen.append)
    assert len(recs) == 4 == len(seen)
    assert {(r.variant, r.query) for r in recs} == {(v.id, q) for v in variants for q in queries}
    assert verify_equivalence(recs).ok
    with pytest.raises(ValueError):
        run_suite([EndpointSpec("a"), EndpointSpec("a")], variants, queries)


# equivalence ------------------------------------------------------------------------------------


def _rec(variant, query, d, engine="builtin"):
    return BenchmarkRecord(variant, query, engine, [1.0] * 5, rows=1, digest=d)


def test_equivalence_detects_seeded_violation():
    recs = [_rec(f"low/0.{k}", "q", "aaa") for k in range(1, 10)]
    recs[4] = _rec("low/0.5", "q", "bbb")
    rep = verify_equivalence(recs)
    assert not rep.ok and len(rep.violations) == 1
    v = rep.violations[0]
    assert (v.variant_a, v.variant_b) == ("low/0.1", "low/0.5")


def test_equivalence_single_variant_group():
    rep = verify_equivalence([_rec("low/0.1", "q", "x")])
    assert rep.ok and rep.groups == 1


def test_equivalence_groups_by_size_and_skips_timeouts():
    recs = [_rec("low/0.1", "q", "a"), _rec("high/0.1", "q", "b"),
            BenchmarkRecord("low/0.9", "q", "builtin", [None], timed_out=True)]
    rep = verify_equivalence(recs)
    assert rep.ok and rep.groups == 2 and rep.unverified == [("q", "builtin", "low/0.9")]
    assert not verify_equivalence(recs, by_size=False).ok


# axis codes -------------------------------------------------------------------------------------


def test_cell_codes():
    assert cell_code("low", "low") == "[00]"
    assert cell_code("high", "low") == "[10]"
    assert parse_cell("[01]") == ("low", "high")
    assert SPQCell.from_code("[11]").code == "[11]"
    assert SPQCell("low", "0.3").code == "low/0.3"
    for bad in ("[2]", "[0x]", "00"):
        with pytest.raises(ValueError):
            parse_cell(bad)

import itertools
import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from spqlab.rdf import Dataset, Triple, iri
from spqlab.sparql.ast import TriplePattern, Var
from spqlab.sparql.parser import UnsupportedFeature, parse_query
from spqlab.store.evaluate import EvalOptions, evaluate
from spqlab.store.index import estimate_cardinality, load, lookup
from spqlab.store.joins import (
    JoinAlgorithm,
    UnsortedInput,
    hash_join,
    join,
    left_join,
    merge_join,
    nested_loop_join,
    sort_table,
)
from spqlab.store.planner import PlannerConfig, TooManyPatterns, candidate_count, plan
from spqlab.store.table import BindingTable, QueryTimeout

import randq
from conftest import ex
from oracles import NaiveSparql, naive_join, result_multiset

X, Y, Z = Var("x"), Var("y"), Var("z")
P = "PREFIX e: <http://ex/> "


def names(result, var):
    return sorted(t.lexical.rsplit("/", 1)[1] for t in result.column(var) if t is not None)


# lookups ----------------------------------------------------------------------------


def test_intro_cardinalities(intro_store):
    assert estimate_cardinality(intro_store, (X, ex("located_in"), Y)) == 3
    assert estimate_cardinality(intro_store, (X, ex("nope"), Y)) == 0
    assert estimate_cardinality(intro_store, (X, Y, Z)) == 8
    assert len(lookup(intro_store, TriplePattern(X, ex("instance_of"), ex("city")))) == 1


def test_repeated_variable(intro_store):
    assert len(intro_store.lookup((X, ex("located_in"), X))) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_index_completeness(seed):
    rng = random.Random(seed)
    triples = randq.random_triples(rng, 300)
    store = load(Dataset.from_triples(triples))
    enc = store.triples
    if not enc:
        return
    pos = {"S": 0, "P": 1, "O": 2}
    probe = rng.choice(enc)
    for k in range(4):
        for bound in itertools.combinations(range(3), k):
            want = sorted(t for t in enc if all(t[i] == probe[i] for i in bound))
            for order, idx in store.indexes.items():
                perm = [pos[c] for c in order]
                if set(perm[:k]) != set(bound):
                    continue
                _, lo, hi = store._range(order, tuple(probe[i] for i in perm[:k]))
                inv = [perm.index(i) for i in range(3)]
                got = sorted(tuple(r[inv[i]] for i in range(3)) for r in idx[lo:hi])
                assert got == want
            pattern = tuple(probe[i] if i in bound else Var(f"v{i}") for i in range(3))
            assert store.count(pattern) == len(want)


# joins --------------------------------------------------------------------------------


def _bt(schema, rows):
    return BindingTable(tuple(schema), [tuple(r) for r in rows])


def test_equality_join():
    got = join(_bt(["x"], [["SoL"], ["NY"]]), _bt(["x"], [["NY"]]))
    assert got.rows == [("NY",)]


def test_cartesian_product():
    got = hash_join(_bt(["a"], [[1], [2]]), _bt(["b"], [[1], [2], [3]]))
    assert len(got) == 6


def test_intro_join(intro_store):
    res = evaluate(intro_store, P + "SELECT ?x ?y WHERE { ?x e:located_in ?y . ?y e:instance_of e:city }")
    assert [(a.lexical, b.lexical) for a, b in res.rows] == [("http://ex/StatueOfLiberty", "http://ex/NewYork")]


def random_table(rng, schema, n, domain, nulls=False):
    rows = []
    for _ in range(n):
        rows.append(tuple(None if nulls and rng.random() < 0.15 else rng.randrange(domain) for _ in schema))
    return BindingTable(tuple(schema), rows)


def _ms(table):
    return Counter(frozenset((v, x) for v, x in zip(table.schema, r) if x is not None) for r in table.rows)


def _join_instance(seed):
    rng = random.Random(seed)
    pool = ["a", "b", "c", "d"]
    ls = rng.sample(pool, rng.randint(1, 3))
    rs = rng.sample(pool, rng.randint(1, 3))
    dom = rng.randint(1, 5)
    return (random_table(rng, ls, rng.randint(0, 12), dom),
            random_table(rng, rs, rng.randint(0, 12), dom))


@pytest.mark.parametrize("chunk", range(10))
def test_join_algorithms_agree(chunk):
    for seed in range(chunk * 100, chunk * 100 + 100):
        left, right = _join_instance(seed)
        want = naive_join(left.schema, left.rows, right.schema, right.rows)
        shared = [v for v in left.schema if v in right.schema]
        assert _ms(nested_loop_join(left, right)) == want
        assert _ms(hash_join(left, right)) == want
        sl, sr = sort_table(left, shared), sort_table(right, shared)
        assert _ms(merge_join(sl, sr)) == want


def test_join_with_unbound_cells():
    for seed in range(200):
        rng = random.Random(seed)
        left = random_table(rng, ["a", "b"], 8, 3, nulls=True)
        right = random_table(rng, ["b", "c"], 8, 3, nulls=True)
        want = naive_join(left.schema, left.rows, right.schema, right.rows)
        assert _ms(nested_loop_join(left, right)) == want
        assert _ms(hash_join(left, right)) == want


def test_merge_rejects_unsorted():
    left = _bt(["x"], [[3], [1]])
    right = _bt(["x"], [[1]])
    with pytest.raises(UnsortedInput):
        merge_join(left, right)


def test_left_join_pads():
    got = left_join(_bt(["x"], [[1], [2]]), _bt(["x", "y"], [[1, 9]]))
    assert sorted(got.rows, key=str) == [(1, 9), (2, None)]


# planning -------------------------------------------------------------------------------


def _chain(n):
    return [(Var(f"v{i}"), iri(f"http://r/p{i % 4}"), Var(f"v{i + 1}")) for i in range(n)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_exhaustive_candidate_count(n):
    store = load(Dataset.from_triples(randq.random_triples(random.Random(n), 200)))
    p = plan(store, _chain(n), PlannerConfig(mode="exhaustive"))
    assert p.candidates == math.factorial(n) * 3 ** n == candidate_count(n)
    assert p.n == n


def test_162_for_three():
    assert candidate_count(3) == 162


def test_too_many_patterns():
    store = load(Dataset.from_triples(randq.random_triples(random.Random(0), 50)))
    with pytest.raises(TooManyPatterns):
        plan(store, _chain(7), PlannerConfig(mode="exhaustive"))
    assert plan(store, _chain(7)).n == 7


def test_single_pattern_plan(intro_store):
    p = plan(intro_store, [(X, ex("located_in"), Y)])
    assert p.n == 1 and p.order == [0]


def test_greedy_starts_with_selective_pattern(intro_store):
    star = [(X, ex("located_in"), Y), (X, ex("instance_of"), Z), (X, ex("instance_of"), ex("statue"))]
    assert plan(intro_store, star).order[0] == 2
    assert plan(intro_store, star, PlannerConfig(mode="exhaustive")).cost <= plan(intro_store, star).cost


def _random_bgp(rng):
    atoms = []
    for _ in range(4):
        s = "?" + rng.choice(randq.VARS)
        o = "?" + rng.choice(randq.VARS) if rng.random() < 0.8 else f"<{rng.choice(randq.NODES).lexical}>"
        atoms.append(f"{s} <http://r/p{rng.randrange(4)}> {o}")
    return "SELECT * WHERE { " + " . ".join(atoms) + " }"


@pytest.mark.parametrize("chunk", range(4))
def test_exhaustive_never_costlier(chunk):
    for seed in range(chunk * 25, chunk * 25 + 25):
        rng = random.Random(seed)
        store = load(Dataset.from_triples(randq.random_triples(rng, 150)))
        q = parse_query(_random_bgp(rng))
        pats = [(a.s, a.p, a.o) for a in q.where.elements[0].atoms]
        g = plan(store, pats)
        e = plan(store, pats, PlannerConfig(mode="exhaustive"))
        assert e.cost <= g.cost + 1e-9
        rg = evaluate(store, q, EvalOptions(mode="greedy"))
        re_ = evaluate(store, q, EvalOptions(mode="exhaustive"))
        assert rg.multiset() == re_.multiset()
        assert re_.metrics.candidates == 24 * 81


# evaluation --------------------------------------------------------------------------------


def test_intro_select(intro_store):
    res = evaluate(intro_store, P + "SELECT ?x WHERE { ?x e:instance_of e:city }")
    assert names(res, "x") == ["NewYork"]


def test_intro_optional(intro_store):
    res = evaluate(intro_store, P + "SELECT ?x ?y ?n WHERE { ?x e:located_in ?y OPTIONAL { ?y e:known_as ?n } }")
    assert len(res) == 3
    bound = [(y.lexical, n.lexical) for x, y, n in res.rows if n is not None]
    assert bound == [("http://ex/UnitedStates", "http://ex/The_US")]


def test_intro_plus(intro_store):
    res = evaluate(intro_store, P + "SELECT ?x WHERE { e:StatueOfLiberty e:located_in+ ?x }")
    assert names(res, "x") == ["NewYork", "The_US", "UnitedStates"]


def test_intro_inverse_and_star(intro_store):
    res = evaluate(intro_store, P + "SELECT ?x WHERE { e:NewYork ^e:located_in ?x }")
    assert names(res, "x") == ["StatueOfLiberty"]
    res = evaluate(intro_store, P + "SELECT ?x WHERE { e:NewYork e:located_in* ?x }")
    assert names(res, "x") == ["NewYork", "UnitedStates"]


def test_union_and_count(intro_store):
    res = evaluate(intro_store, P + "SELECT (COUNT(*) AS ?c) WHERE { { ?x e:located_in ?y } UNION { ?x e:instance_of ?y } }")
    assert res.rows[0][0].lexical == "6"
    res = evaluate(intro_store, P + "SELECT ?x (COUNT(?y) AS ?c) WHERE { ?x e:located_in ?y } GROUP BY ?x ORDER BY ?x")
    assert [(x.lexical.rsplit("/", 1)[1], c.lexical) for x, c in res.rows] == [("NewYork", "1"), ("StatueOfLiberty", "2")]


def test_order_limit_offset(intro_store):
    q = P + "SELECT DISTINCT ?x WHERE { ?x ?p ?o } ORDER BY DESC(?x) LIMIT 2 OFFSET 1"
    assert names(evaluate(intro_store, q), "x") == ["NewYork", "StatueOfLiberty"]


def test_order_is_load_order_independent(intro_triples):
    q = P + "SELECT ?x ?y WHERE { ?x e:located_in ?y } ORDER BY ?y ?x"
    a = evaluate(load(Dataset.from_triples(intro_triples)), q).rows
    b = evaluate(load(Dataset.from_triples(intro_triples[::-1])), q).rows
    assert a == b


def test_deep_optional_rejected(intro_store):
    q = "SELECT * WHERE { ?a <p> ?b OPTIONAL { ?b <q> ?c OPTIONAL { ?c <r> ?d OPTIONAL { ?d <s> ?e } } } }"
    with pytest.raises(UnsupportedFeature):
        evaluate(intro_store, q)


def test_timeout_discards_partial_results():
    triples = [Triple(iri(f"http://t/s{i}"), iri("http://t/p"), iri(f"http://t/o{i}")) for i in range(400)]
    store = load(Dataset.from_triples(triples))
    q = "SELECT * WHERE { ?a <http://t/p> ?b . ?c <http://t/p> ?d . ?e <http://t/p> ?f }"
    with pytest.raises(QueryTimeout):
        evaluate(store, q, EvalOptions(timeout_ms=50))


def test_metrics_recorded(intro_store):
    res = evaluate(intro_store, P + "SELECT * WHERE { ?x e:located_in ?y . ?y e:instance_of ?t }")
    assert res.metrics.plans and res.metrics.peak_rows >= len(res)
    assert any(line.startswith("wall_ms=") for line in res.metrics.lines())


@pytest.mark.parametrize("chunk", range(5))
def test_matches_naive_evaluator(chunk):
    for seed in range(chunk * 20, chunk * 20 + 20):
        rng = random.Random(seed)
        triples = randq.random_triples(rng, 1000)
        store = load(Dataset.from_triples(triples))
        q = parse_query(randq.random_query(rng, max_atoms=4))
        want = NaiveSparql(triples).select(q)
        for mode, algo in [("greedy", None), ("exhaustive", None), ("greedy", "nl"), ("greedy", "merge")]:
            got = result_multiset(evaluate(store, q, EvalOptions(mode=mode, algorithm=algo)))
            assert got == want, (seed, mode, algo)

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spqlab.rdf import RDF_TYPE, Dataset, Triple, iri
from spqlab.structuredness import (
    EmptyTypeSystem,
    analyze,
    coherence,
    coverage,
    dataset_coherence,
    dataset_stats,
    extract_type_system,
)

from conftest import INSTANCE_OF, ex
from oracles import naive_coherence
from randq import TYPE, random_typed_triples



def _ds(rows):
    return Dataset.from_triples([Triple(ex(s), TYPE if p == "a" else ex(p), ex(o)) for s, p, o in rows])


def _cv_fixture():
    # i1 sets p1 and p2, i2 sets only p1
    return _ds([("i1", "a", "T"), ("i2", "a", "T"), ("i1", "p1", "x"), ("i1", "p2", "y"), ("i2", "p1", "z")])


def test_intro_type_system(intro):
    ts = extract_type_system(intro, INSTANCE_OF)
    d = intro.dictionary
    names = {d.term(t).lexical.rsplit("/", 1)[1] for t in ts.types}
    assert names == {"statue", "city", "metropolis"}
    city = d.lookup(ex("city"))
    assert ts.instances[city] == frozenset({d.lookup(ex("NewYork"))})
    # NewYork is in both instance sets
    metro = d.lookup(ex("metropolis"))
    assert ts.instances[metro] == ts.instances[city]


def test_no_types_raises(intro):
    with pytest.raises(EmptyTypeSystem):
        coherence(extract_type_system(intro))        # rdf:type absent


def test_coverage_three_quarters():
    ds = _cv_fixture()
    ts = extract_type_system(ds)
    t = ds.dictionary.lookup(ex("T"))
    assert coverage(t, ts) == Fraction(3, 4)
    assert dataset_coherence(ds) == Fraction(3, 4)


def test_full_coverage_is_one():
    ds = _ds([("i1", "a", "T"), ("i2", "a", "T"), ("i1", "p", "x"), ("i2", "p", "y")])
    assert dataset_coherence(ds) == 1


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_disjoint_properties(n):
    rows = [(f"i{k}", "a", "T") for k in range(n)] + [(f"i{k}", f"p{k}", "v") for k in range(n)]
    assert dataset_coherence(_ds(rows)) == Fraction(1, n)


def test_presence_only_counting():
    base = _cv_fixture()
    more = _ds([("i1", "a", "T"), ("i2", "a", "T"), ("i1", "p1", "x"), ("i1", "p2", "y"),
                ("i2", "p1", "z"), ("i2", "p1", "w"), ("i1", "p2", "q")])
    assert dataset_coherence(more) == dataset_coherence(base)


def test_weights_by_properties_plus_instances():
    # T: 2 props, 2 instances, CV 3/4; U: 1 prop, 1 instance, CV 1
    ds = _ds([("i1", "a", "T"), ("i2", "a", "T"), ("i1", "p1", "x"), ("i1", "p2", "y"),
              ("i2", "p1", "z"), ("j", "a", "U"), ("j", "q", "v")])
    assert dataset_coherence(ds) == Fraction(4, 6) * Fraction(3, 4) + Fraction(2, 6) * 1


def test_intro_stats(intro):
    st_ = dataset_stats(intro)
    assert st_.triples == 8
    assert st_.predicates == 4
    assert dataset_stats(Dataset([], intro.dictionary)).triples == 0


def test_analyze_keys(intro):
    out = analyze(intro, INSTANCE_OF)
    assert out["triples"] == 8 and out["types"] == 3
    assert 0 <= out["structuredness"] <= 1
    assert analyze(intro)["structuredness"] == "undefined"


# random datasets -----------------------------------------------------------


def _check_against_oracle(triples):
    ds = Dataset.from_triples(triples)
    got = dataset_coherence(ds)
    want = naive_coherence(triples, TYPE)
    assert abs(float(got) - float(want)) <= 1e-12
    assert got == want
    return got


@pytest.mark.parametrize("seed", range(40))
def test_oracle_small(seed):
    _check_against_oracle(random_typed_triples(random.Random(seed), 400))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_permutation_and_duplication_invariance(seed):
    rng = random.Random(seed)
    triples = random_typed_triples(rng, 600)
    base = dataset_coherence(Dataset.from_triples(triples))
    shuffled = list(triples)
    rng.shuffle(shuffled)
    assert dataset_coherence(Dataset.from_triples(shuffled)) == base
    dup = triples + rng.sample(triples, len(triples) // 3)
    assert dataset_coherence(Dataset.from_triples(dup)) == base


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_coherence_in_unit_interval(seed):
    ch = dataset_coherence(Dataset.from_triples(random_typed_triples(random.Random(seed), 300)))
    assert 0 <= ch <= 1

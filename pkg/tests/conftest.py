import io

import pytest

from spqlab.rdf import Dataset, iri, parse_stream

EX = "http://ex/"

# the eight-triple New York example; instance_of stands in for rdf:type
INTRO_NT = """\
<http://ex/StatueOfLiberty> <http://ex/located_in> <http://ex/NewYork> .
<http://ex/StatueOfLiberty> <http://ex/located_in> <http://ex/The_US> .
<http://ex/StatueOfLiberty> <http://ex/instance_of> <http://ex/statue> .
<http://ex/NewYork> <http://ex/instance_of> <http://ex/city> .
<http://ex/NewYork> <http://ex/located_in> <http://ex/UnitedStates> .
<http://ex/NewYork> <http://ex/instance_of> <http://ex/metropolis> .
<http://ex/UnitedStates> <http://ex/known_as> <http://ex/The_US> .
<http://ex/UnitedStates> <http://ex/biggest_city_is> <http://ex/NewYork> .
"""

INSTANCE_OF = iri(EX + "instance_of")


def ex(name: str):
    return iri(EX + name)


@pytest.fixture
def intro_triples():
    return [t for t, _ in parse_stream(io.BytesIO(INTRO_NT.encode()))]


@pytest.fixture
def intro(intro_triples):
    return Dataset.from_triples(intro_triples)


@pytest.fixture
def intro_store(intro):
    from spqlab.store.index import load
    return load(intro)


# acceptance lines, printed after the run whatever the capture mode
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])

"""Random stores and random queries in the supported subset."""

import random
import re

from spqlab.rdf import RDF_TYPE, XSD, Triple, iri, literal

NS = "http://r/"
NODES = [iri(f"{NS}e{k}") for k in range(8)]
PREDS = [iri(f"{NS}p{k}") for k in range(4)]
INTS = [literal(str(k), XSD + "integer") for k in range(10)]
VARS = ["a", "b", "c", "d"]
TYPE = iri(RDF_TYPE)


def random_triples(rng: random.Random, n_max: int = 1000):
    """Up to ``n_max`` triples; the node pool grows with the store so joins stay sparse.

    Queries only name the first eight nodes as constants.
    """
    n = rng.randint(0, n_max)
    nodes = NODES + [iri(f"{NS}e{k}") for k in range(len(NODES), max(len(NODES), n // 12))]
    out = []
    for _ in range(n):
        s = rng.choice(nodes)
        p = rng.choice(PREDS)
        o = rng.choice(nodes) if rng.random() < 0.7 else rng.choice(INTS)
        out.append(Triple(s, p, o))
    return out


def _term(t):
    if t.kind == "iri":
        return f"<{t.lexical}>"
    return t.lexical


def _node(rng, var_p=0.8):
    if rng.random() < var_p:
        return "?" + rng.choice(VARS)
    return _term(rng.choice(NODES))


def _obj(rng):
    r = rng.random()
    if r < 0.75:
        return "?" + rng.choice(VARS)
    if r < 0.85:
        return _term(rng.choice(NODES))
    return _term(rng.choice(INTS))


def _pred(rng, allow_paths=True, allow_var=True):
    p = lambda: _term(rng.choice(PREDS))
    r = rng.random()
    if allow_var and r < 0.08:
        return "?" + rng.choice(VARS)
    if not allow_paths or r < 0.55:
        return p()
    return rng.choice([
        lambda: "^" + p(),
        lambda: p() + "+",
        lambda: p() + "*",
        lambda: p() + "?",
        lambda: f"{p()}/{p()}",
        lambda: f"^{p()}/{p()}",
        lambda: f"({p()}/{p()})+",
    ])()


def _atom(rng, paths):
    return f"{_node(rng)} {_pred(rng, paths)} {_obj(rng)} ."


def _filter(rng):
    v = "?" + rng.choice(VARS)
    return rng.choice([
        lambda: f"FILTER ({v} < {rng.randrange(10)})",
        lambda: f"FILTER ({v} >= {rng.randrange(10)})",
        lambda: f"FILTER ({v} = {_term(rng.choice(NODES))})",
        lambda: f"FILTER ({v} != {_term(rng.choice(NODES))})",
        lambda: f"FILTER (bound({v}) || {v} > 4)",
        lambda: f"FILTER (!bound({v}))",
    ])()


def _group(rng, depth, paths):
    parts = [_atom(rng, paths) for _ in range(rng.randint(1, 3))]
    if depth < 2 and rng.random() < 0.35:
        inner = _group(rng, depth + 1, paths)
        parts.append("OPTIONAL { " + inner + " }")
    if depth < 2 and rng.random() < 0.25:
        parts.append("{ " + _group(rng, depth + 1, paths) + " } UNION { "
                     + _group(rng, depth + 1, paths) + " }")
    if rng.random() < 0.3:
        parts.append(_filter(rng))
    rng.shuffle(parts)
    return " ".join(parts)


def random_query(rng: random.Random, paths: bool = True, max_atoms: int = 0) -> str:
    """SELECT * or a projection, sometimes DISTINCT; the pattern is never empty.

    ``max_atoms`` > 0 redraws until the pattern has at most that many atoms.
    """
    body = _group(rng, 0, paths)
    while max_atoms and body.count(" .") > max_atoms:
        body = _group(rng, 0, paths)
    atoms_only = re.sub(r"FILTER \((?:[^()]|\([^()]*\))*\)", "", body)
    used = sorted({v for v in VARS if "?" + v in atoms_only})
    head = "*"
    if used and rng.random() < 0.5:
        head = " ".join("?" + v for v in rng.sample(used, rng.randint(1, len(used))))
    distinct = "DISTINCT " if rng.random() < 0.2 else ""
    return f"SELECT {distinct}{head} WHERE {{ {body} }}"


def _ex(name):
    return iri("http://ex/" + name)


def random_typed_triples(rng: random.Random, n_max: int = 5000):
    n_types = rng.randint(1, 6)
    n_inst = rng.randint(1, 120)
    n_props = rng.randint(1, 15)
    n_target = rng.randint(1, n_max)
    rows = []
    for i in range(n_inst):
        for _ in range(1 if rng.random() < 0.8 else 2):
            rows.append((f"i{i}", "a", f"T{rng.randrange(n_types)}"))
    while len(rows) < n_target:
        s = f"i{rng.randrange(n_inst)}" if rng.random() < 0.85 else f"u{rng.randrange(20)}"
        rows.append((s, f"p{rng.randrange(n_props)}", f"o{rng.randrange(50)}"))
    return [Triple(_ex(s), TYPE if p == "a" else _ex(p), _ex(o)) for s, p, o in rows]

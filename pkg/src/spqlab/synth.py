"""Seeded synthetic seed datasets with tunable structuredness.

Typed instances set each of their type's properties with a per-property
probability.  The first properties of every type are multi-valued and the
last one links to earlier instances.  Untyped subjects
carry multi-valued descriptive data that size trimming can thin without
moving coherence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .rdf import RDF_TYPE, XSD, Dataset, Triple, iri, literal

NS = "http://example.org/synth/"


@dataclass(frozen=True)
class SynthConfig:
    n_triples: int = 10_000
    n_types: int = 5
    min_props: int = 5
    max_props: int = 9
    heavy_share: float = 0.3            # fraction of a type's properties that are multi-valued
    heavy_mean: float = 8.0             # mean objects of a multi-valued property
    min_presence: float = 0.55          # per-property presence probability range
    max_presence: float = 1.0
    untyped_share: float = 0.55         # fraction of triples on untyped subjects
    untyped_mean: float = 3.0           # mean objects per untyped (subject, predicate)
    multi_type_share: float = 0.0
    seed: int = 0


def _count(rng: random.Random, mean: float) -> int:
    """At least one, geometric tail with the given mean."""
    if mean <= 1:
        return 1
    p = 1.0 / mean
    n = 1
    while rng.random() > p:
        n += 1
    return n


def synth_triples(cfg: SynthConfig = SynthConfig()) -> list[Triple]:
    rng = random.Random(cfg.seed)
    rdf_type = iri(RDF_TYPE)
    types = []
    for t in range(cfg.n_types):
        n_props = rng.randint(cfg.min_props, cfg.max_props)
        props = []
        for j in range(n_props):
            heavy = j < max(1, round(cfg.heavy_share * n_props))
            link = not heavy and j == n_props - 1
            presence = rng.uniform(cfg.min_presence, cfg.max_presence)
            props.append((iri(f"{NS}T{t}/p{j}"), heavy, link, presence))
        types.append((iri(f"{NS}Type{t}"), props))

    out: list[Triple] = []
    instances: list = []
    typed_budget = int(cfg.n_triples * (1.0 - cfg.untyped_share))
    k = 0
    while len(out) < typed_budget:
        t_idx = rng.randrange(cfg.n_types)
        subj = iri(f"{NS}i{k}")
        k += 1
        out.append(Triple(subj, rdf_type, types[t_idx][0]))
        if rng.random() < cfg.multi_type_share:
            other = (t_idx + 1 + rng.randrange(cfg.n_types - 1)) % cfg.n_types if cfg.n_types > 1 else t_idx
            if other != t_idx:
                out.append(Triple(subj, rdf_type, types[other][0]))
        set_any = False
        for j, (p, heavy, link, presence) in enumerate(types[t_idx][1]):
            if rng.random() >= presence and (set_any or j < len(types[t_idx][1]) - 1):
                continue
            set_any = True
            n = _count(rng, cfg.heavy_mean) if heavy else 1
            for v in range(n):
                if link and instances:
                    obj = rng.choice(instances)
                elif heavy:
                    obj = literal(f"v{rng.randrange(1_000_000)}")
                else:
                    obj = literal(str(rng.randrange(10_000)), XSD + "integer")
                out.append(Triple(subj, p, obj))
        instances.append(subj)

    preds = [iri(f"{NS}u/d{j}") for j in range(6)]
    u = 0
    while len(out) < cfg.n_triples:
        subj = iri(f"{NS}u{u}")
        u += 1
        for p in rng.sample(preds, rng.randint(1, 3)):
            for _ in range(_count(rng, cfg.untyped_mean)):
                out.append(Triple(subj, p, literal(f"d{rng.randrange(1_000_000)}")))
    return _dedupe(out)


def _dedupe(triples: list[Triple]) -> list[Triple]:
    return list(dict.fromkeys(triples))


def synth_dataset(cfg: SynthConfig = SynthConfig()) -> Dataset:
    return Dataset.from_triples(synth_triples(cfg))

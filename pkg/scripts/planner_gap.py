"""How much does exhaustive planning save over the greedy heuristic?

Random BGPs over random stores; prints the cost ratio distribution and how
often the two planners pick a different join order.
"""

import argparse
import random
import statistics
import sys
from pathlib import Path

from spqlab.rdf import Dataset, iri
from spqlab.sparql.ast import Var
from spqlab.store.index import load
from spqlab.store.planner import PlannerConfig, plan

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
import randq  # noqa: E402


def random_bgp(rng, n):
    pats = []
    for _ in range(n):
        s = Var(rng.choice(randq.VARS))
        o = Var(rng.choice(randq.VARS)) if rng.random() < 0.8 else rng.choice(randq.NODES)
        pats.append((s, iri(f"http://r/p{rng.randrange(4)}"), o))
    return pats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--queries", type=int, default=200)
    ap.add_argument("--patterns", type=int, default=4)
    ap.add_argument("--triples", type=int, default=800)
    ap.add_argument("--noise", type=float, default=1.0, help="cardinality misestimation factor")
    args = ap.parse_args()

    ratios, differ = [], 0
    for seed in range(args.queries):
        rng = random.Random(seed)
        store = load(Dataset.from_triples(randq.random_triples(rng, args.triples)))
        pats = random_bgp(rng, args.patterns)
        g = plan(store, pats, PlannerConfig(noise=args.noise, noise_seed=seed))
        e = plan(store, pats, PlannerConfig(mode="exhaustive", noise=args.noise, noise_seed=seed))
        ratios.append(g.cost / e.cost if e.cost > 0 else 1.0)
        differ += g.order != e.order
    ratios.sort()
    q = statistics.quantiles(ratios, n=10)
    print(f"{args.queries} queries of {args.patterns} patterns, noise {args.noise}")
    print(f"greedy/exhaustive cost: median {statistics.median(ratios):.3f}, p90 {q[-1]:.3f}, max {ratios[-1]:.3f}")
    print(f"different join order in {differ} queries")


if __name__ == "__main__":
    main()

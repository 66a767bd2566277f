"""Generate the nine-ratio sweep from one seed and print how close each variant lands.

    python3 scripts/run_sweep.py --synth 10000
    python3 scripts/run_sweep.py --seed data.nt --out out/sweep --protect queries/synth/q01_sm.rq
"""

import argparse
import time
from pathlib import Path

from spqlab.generator import GenerationConfig, generate
from spqlab.rdf import load_ntriples, save_ntriples
from spqlab.structuredness import dataset_coherence
from spqlab.synth import SynthConfig, synth_dataset


def main():
    ap = argparse.ArgumentParser()
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--seed", help="N-Triples seed file")
    src.add_argument("--synth", type=int, help="size of a synthetic seed")
    ap.add_argument("--synth-seed", type=int, default=0)
    ap.add_argument("--size-fraction", type=float, default=0.7)
    ap.add_argument("--protect", action="append", default=[])
    ap.add_argument("--out", help="write each variant as <out>/<ratio>.nt")
    args = ap.parse_args()

    seed = load_ntriples(args.seed) if args.seed else synth_dataset(SynthConfig(args.synth, seed=args.synth_seed))
    seed_ch = float(dataset_coherence(seed))
    queries = [Path(p).read_text() for p in args.protect]
    target = args.size_fraction * len(seed.triples)
    print(f"seed: {len(seed.triples)} triples, CH {seed_ch:.4f}")
    print(f"{'ratio':>5} {'target':>8} {'CH':>8} {'err':>8} {'size':>8} {'size err':>8} {'solve s':>8} status")
    for k in range(1, 10):
        ratio = k / 10
        t0 = time.perf_counter()
        res = generate(seed, GenerationConfig(ratio=ratio, size_fraction=args.size_fraction), queries)
        wall = time.perf_counter() - t0
        ch = float(res.coherence)
        print(f"{ratio:5.1f} {ratio * seed_ch:8.4f} {ch:8.4f} {ch - ratio * seed_ch:+8.4f} {res.size:8d} "
              f"{(res.size - target) / target:+8.2%} {res.solution.elapsed_s:8.2f} "
              f"{res.solution.status.value} ({wall:.1f}s total)")
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            save_ntriples(res.dataset, out / f"{ratio:g}.nt")


if __name__ == "__main__":
    main()

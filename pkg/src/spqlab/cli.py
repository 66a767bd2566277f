"""Command line entry point: ``spqlab <subcommand>``."""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import bench
from .generator import GenerationConfig, InfeasibleProblem, InfeasibleTarget, generate
from .generator.lpfile import export_lp
from .generator.problem import build_problem
from .generator.protect import Unprotectable, protected_pairs
from .rdf import NTriplesError, ParseErrors, iri, load_ntriples, save_ntriples
from .report import (
    OUTPUT_ROOT_ENV,
    ConfigError,
    ExperimentConfig,
    ScatterSpec,
    emit_csv,
    emit_svg,
    load_csv,
    output_root,
    parse_duration,
    run_experiment,
)
from .sparql.features import classify_query
from .sparql.parser import QuerySyntaxError, UnsupportedFeature, parse_query
from .store.evaluate import EvalOptions, evaluate
from .store.index import load
from .store.planner import TooManyPatterns
from .store.table import QueryTimeout
from .structuredness import EmptyTypeSystem, analyze


def _type_predicate(args):
    return iri(args.type_predicate) if getattr(args, "type_predicate", None) else None


def cmd_analyze(args) -> int:
    errors = ParseErrors()
    ds = load_ntriples(args.data, fail_fast=args.strict, errors=errors)
    for key, value in analyze(ds, _type_predicate(args)).items():
        if isinstance(value, Fraction):
            value = f"{float(value):.6f}"
        print(f"{key}={value}")
    print(f"skipped_lines={len(errors)}")
    return 0


def cmd_generate(args) -> int:
    seed = load_ntriples(args.seed)
    queries = [Path(p).read_text(encoding="utf-8") for p in args.protect]
    target = args.size if args.size is not None else int(round(args.size_fraction * len(seed.triples)))
    cfg = GenerationConfig(
        ratio=args.ratio, target_size=target, epsilon=Fraction(args.epsilon),
        budget_s=parse_duration(args.budget, "s"), type_predicate=_type_predicate(args),
        random_seed=args.random_seed,
    )
    if args.export_lp:
        prot = protected_pairs(queries, seed)
        problem = build_problem(seed, cfg.ratio, target, prot, cfg.epsilon, cfg.budget_s, cfg.type_predicate)
        Path(args.export_lp).write_text(export_lp(problem), encoding="utf-8")
    res = generate(seed, cfg, queries)
    out = Path(args.out) if args.out else output_root() / "generated" / f"{Path(args.seed).stem}-r{args.ratio:g}.nt"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_ntriples(res.dataset, out)
    for key, value in res.provenance().items():
        print(f"{key}={value}")
    print(f"output={out}")
    return 0 if res.size_reached else 1


def cmd_classify(args) -> int:
    status = 0
    for path in args.queries:
        try:
            c = classify_query(parse_query(Path(path).read_text(encoding="utf-8")))
            print(f"{path},{c.feature_string()},{c.label}")
        except UnsupportedFeature as exc:
            print(f"{path},unsupported:{exc.construct},error")
            status = 1
        except QuerySyntaxError as exc:
            print(f"{path},syntax:{exc.reason} at {exc.position},error")
            status = 1
    return status


def cmd_eval(args) -> int:
    store = load(load_ntriples(args.data))
    text = Path(args.query).read_text(encoding="utf-8")
    algo = None if args.algo == "auto" else args.algo
    opts = EvalOptions(mode=args.mode, algorithm=algo, timeout_ms=parse_duration(args.timeout))
    try:
        res = evaluate(store, text, opts)
    except QueryTimeout:
        print("status=timeout")
        return 1
    if not args.quiet:
        print("\t".join("?" + v for v in res.variables))
        for row in res.rows:
            print("\t".join("" if t is None else t.n3() for t in row))
    print(f"rows={len(res)}")
    for line in res.metrics.lines():
        print(line)
    return 0


def cmd_bench(args) -> int:
    queries = {Path(p).stem: Path(p).read_text(encoding="utf-8") for p in args.query}
    variants = []
    for spec in args.data:
        label, _, path = spec.rpartition("=")
        size, _, struct = (label or Path(path).stem).partition("/")
        variants.append(bench.DatasetVariant(size, struct or "seed", path))
    endpoints = []
    if args.endpoint:
        for spec in args.endpoint:
            label, _, url = spec.partition("=")
            endpoints.append(bench.EndpointSpec(label, bench.EndpointKind.HTTP, url,
                                                parse_duration(args.timeout)))
    else:
        endpoints.append(bench.EndpointSpec("builtin", timeout_ms=parse_duration(args.timeout)))
    records = bench.run_suite(endpoints, variants, queries, args.repeats, parse_duration(args.timeout))
    out = Path(args.out) if args.out else output_root() / "bench.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(emit_csv(records), encoding="utf-8")
    eq = bench.verify_equivalence(records)
    for r in records:
        g = r.gmean_ms
        state = "timeout" if r.timed_out else ("error" if r.error else f"{g:.3f}ms")
        print(f"{r.variant} {r.query} {r.engine} {state} rows={r.rows}")
    for v in eq.violations:
        print(f"mismatch {v.query} {v.engine} {v.variant_a} {v.variant_b}")
    print(f"records={out}")
    return 0 if eq.ok and not any(r.error for r in records) else 1


def cmd_report(args) -> int:
    if args.records:
        records = load_csv(Path(args.records).read_text(encoding="utf-8"))
        svg = emit_svg(records, ScatterSpec(log_y=not args.linear, ceiling_ms=parse_duration(args.timeout)))
        out = Path(args.svg) if args.svg else Path(args.records).with_suffix(".svg")
        out.write_text(svg, encoding="utf-8")
        print(f"svg={out}")
        return 0
    if not args.config:
        print("report needs --config or --records", file=sys.stderr)
        return 2
    cfg = ExperimentConfig.from_file(args.config)
    if args.output:
        cfg.output = args.output
    elif OUTPUT_ROOT_ENV in os.environ:
        cfg.output = str(output_root() / Path(cfg.output).name)
    outcome = run_experiment(cfg)
    print(f"records={outcome.csv_path}")
    print(f"svg={outcome.svg_path}")
    print(f"summary={outcome.summary_path}")
    for f in outcome.failures:
        print(f"failure: {f}", file=sys.stderr)
    return 0 if outcome.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spqlab", description="structuredness, generation and SPARQL benchmarking")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="type system statistics and coherence of an N-Triples file")
    a.add_argument("data")
    a.add_argument("--type-predicate")
    a.add_argument("--strict", action="store_true", help="stop at the first malformed line")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("generate", help="derive a dataset with a lower coherence")
    g.add_argument("--seed", required=True)
    g.add_argument("--ratio", type=float, required=True)
    g.add_argument("--size", type=int)
    g.add_argument("--size-fraction", type=float, default=0.7)
    g.add_argument("--protect", action="append", default=[], help="query file whose answer must not change")
    g.add_argument("--export-lp")
    g.add_argument("--budget", default="120s")
    g.add_argument("--epsilon", default="0.005")
    g.add_argument("--type-predicate")
    g.add_argument("--random-seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("classify", help="feature set and performance class per query file")
    c.add_argument("queries", nargs="+")
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("eval", help="evaluate one query on the built-in store")
    e.add_argument("--data", required=True)
    e.add_argument("--query", required=True)
    e.add_argument("--mode", choices=["greedy", "exhaustive"], default="greedy")
    e.add_argument("--algo", choices=["nl", "hash", "merge", "auto"], default="auto")
    e.add_argument("--timeout", default="5000ms")
    e.add_argument("--quiet", action="store_true", help="metrics only")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="timed runs of queries over dataset variants")
    b.add_argument("--data", action="append", required=True, help="[size/struct=]file.nt")
    b.add_argument("--query", action="append", required=True)
    b.add_argument("--endpoint", action="append", help="label=http://host/sparql (default: built-in)")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--timeout", default="5000ms")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("report", help="run a configured experiment, or re-plot a records CSV")
    r.add_argument("--config")
    r.add_argument("--output")
    r.add_argument("--records")
    r.add_argument("--svg")
    r.add_argument("--timeout", default="5000ms")
    r.add_argument("--linear", action="store_true")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, NTriplesError, ConfigError, EmptyTypeSystem, InfeasibleTarget, InfeasibleProblem,
            Unprotectable, UnsupportedFeature, QuerySyntaxError, TooManyPatterns) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Experiment configuration, CSV/SVG emitters and the end-to-end pipeline."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .bench import (
    BenchmarkRecord,
    DatasetVariant,
    EndpointKind,
    EndpointSpec,
    cell_code,
    run_suite,
    split_variant,
    verify_equivalence,
)
from .generator import GenerationConfig, generate
from .generator.problem import DEFAULT_EPSILON
from .generator.protect import Unprotectable, protected_pairs
from .rdf import Dataset, iri, load_ntriples, save_ntriples
from .sparql.features import Classification, PerformanceClass, classify_query
from .sparql.parser import QuerySyntaxError, UnsupportedFeature, parse_query
from .store.evaluate import EvalOptions
from .structuredness import analyze
from .synth import SynthConfig, synth_dataset

OUTPUT_ROOT_ENV = "SPQ_OUTPUT_ROOT"
DEFAULT_RATIOS = tuple(round(0.1 * k, 1) for k in range(1, 10))
RUN_COLUMNS = 5


def output_root(default: str = "out") -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, default))


def parse_duration(text, unit: str = "ms") -> float:
    """``5000ms``, ``5s``, ``2m`` or a bare number in ``unit``; returns ``unit``."""
    scale = {"ms": 1.0, "s": 1000.0, "m": 60_000.0}
    t = str(text).strip().lower()
    for suffix in ("ms", "s", "m"):
        if t.endswith(suffix) and t[:-len(suffix)].replace(".", "", 1).isdigit():
            return float(t[:-len(suffix)]) * scale[suffix] / scale[unit]
    return float(t)


# --------------------------------------------------------------------------
# configuration


@dataclass
class SeedSpec:
    name: str                           # becomes the size class
    path: Optional[str] = None
    synth_triples: Optional[int] = None
    synth_seed: int = 0
    type_predicate: Optional[str] = None

    def load(self) -> Dataset:
        if self.path:
            return load_ntriples(self.path)
        return synth_dataset(SynthConfig(n_triples=self.synth_triples, seed=self.synth_seed))


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    seeds: list[SeedSpec]
    queries: dict[str, str]                     # id -> .rq path
    endpoints: list[EndpointSpec] = field(default_factory=lambda: [EndpointSpec("builtin")])
    ratios: tuple[float, ...] = DEFAULT_RATIOS
    size_fraction: float = 0.7
    epsilon: Fraction = DEFAULT_EPSILON
    budget_s: float = 120.0
    timeout_ms: float = 5000.0
    repeats: int = 5
    output: str = "out"
    protect: bool = True
    unprotected: tuple[str, ...] = ()           # query ids left out of protection and equivalence
    log_scale: bool = True

    def validate(self, check_paths: bool = True):
        if not self.seeds:
            raise ConfigError("no seed datasets configured")
        if not self.queries:
            raise ConfigError("no queries configured")
        if not self.endpoints:
            raise ConfigError("no endpoints configured")
        labels = [e.label for e in self.endpoints]
        if len(set(labels)) != len(labels):
            raise ConfigError("endpoint labels must be unique")
        for r in self.ratios:
            if not 0 < r <= 1:
                raise ConfigError(f"ratio {r} outside (0, 1]")
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")
        if self.timeout_ms <= 0:
            raise ConfigError("timeout must be positive")
        for s in self.seeds:
            if not s.path and not s.synth_triples:
                raise ConfigError(f"seed {s.name!r} needs a path or synth size")
            if check_paths and s.path and not Path(s.path).exists():
                raise ConfigError(f"seed file {s.path} does not exist")
        unknown = set(self.unprotected) - set(self.queries)
        if unknown:
            raise ConfigError(f"unprotected names unknown queries: {sorted(unknown)}")
        if check_paths:
            for qid, p in self.queries.items():
                if not Path(p).exists():
                    raise ConfigError(f"query file {p} ({qid}) does not exist")
        return self

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text(encoding="utf-8")
        return cls.from_text(text, base=Path(path).parent)

    @classmethod
    def from_text(cls, text: str, base: Path = Path(".")) -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp.read_string(text)
        exp = cp["experiment"] if cp.has_section("experiment") else {}

        def rel(p: str) -> str:
            q = Path(p)
            return str(q if q.is_absolute() else base / q)

        seeds = []
        queries: dict[str, str] = {}
        endpoints = []
        for sec in cp.sections():
            body = cp[sec]
            if sec.startswith("seed:"):
                seeds.append(SeedSpec(
                    name=sec[5:].strip(),
                    path=rel(body["path"]) if "path" in body else None,
                    synth_triples=int(body["synth"]) if "synth" in body else None,
                    synth_seed=int(body.get("synth_seed", "0")),
                    type_predicate=body.get("type_predicate"),
                ))
            elif sec == "queries":
                for qid, p in body.items():
                    queries[qid] = rel(p)
            elif sec.startswith("endpoint:"):
                label = sec[9:].strip()
                kind = body.get("kind", "builtin")
                opts = EvalOptions(
                    mode=body.get("mode", "greedy"),
                    algorithm=None if body.get("algorithm", "auto") == "auto" else body["algorithm"],
                )
                endpoints.append(EndpointSpec(
                    label, EndpointKind(kind), body.get("url"),
                    parse_duration(body.get("timeout", exp.get("timeout", "5000ms"))), opts))
            elif sec != "experiment":
                raise ConfigError(f"unknown section [{sec}]")
        cfg = cls(seeds=seeds, queries=queries)
        if endpoints:
            cfg.endpoints = endpoints
        if "ratios" in exp:
            cfg.ratios = tuple(float(x) for x in exp["ratios"].replace(",", " ").split())
        if "size_fraction" in exp:
            cfg.size_fraction = float(exp["size_fraction"])
        if "epsilon" in exp:
            cfg.epsilon = Fraction(exp["epsilon"])
        if "budget" in exp:
            cfg.budget_s = parse_duration(exp["budget"], "s")
        if "timeout" in exp:
            cfg.timeout_ms = parse_duration(exp["timeout"])
        if "repeats" in exp:
            cfg.repeats = int(exp["repeats"])
        if "output" in exp:
            cfg.output = rel(exp["output"])
        if "protect" in exp:
            cfg.protect = exp["protect"].strip().lower() in ("yes", "true", "1", "on")
        if "unprotected" in exp:
            cfg.unprotected = tuple(exp["unprotected"].replace(",", " ").split())
        if "log_scale" in exp:
            cfg.log_scale = exp["log_scale"].strip().lower() in ("yes", "true", "1", "on")
        return cfg


# --------------------------------------------------------------------------
# CSV


def csv_columns(n_runs: int = RUN_COLUMNS) -> list[str]:
    runs = [f"run{i}" for i in range(1, max(n_runs, RUN_COLUMNS) + 1)]
    return ["variant", "query", "engine", *runs, "gmean_ms", "timed_out", "rows", "digest", "error"]


def emit_csv(records: Sequence[BenchmarkRecord]) -> str:
    n_runs = max([len(r.run_times_ms) for r in records] + [RUN_COLUMNS])
    cols = csv_columns(n_runs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        runs = []
        for i in range(n_runs):
            if i < len(r.run_times_ms):
                t = r.run_times_ms[i]
                runs.append("timeout" if t is None else repr(t))
            else:
                runs.append("")
        g = r.gmean_ms
        w.writerow([r.variant, r.query, r.engine, *runs,
                    "" if g is None else repr(g),
                    "true" if r.timed_out else "false",
                    "" if r.rows is None else r.rows,
                    r.digest or "", (r.error or "").replace("\0", "\ufffd")])  # csv cannot write NUL
    return buf.getvalue()


def load_csv(text: str) -> list[BenchmarkRecord]:
    reader = csv.DictReader(io.StringIO(text))
    run_cols = [c for c in reader.fieldnames or () if c.startswith("run") and c[3:].isdigit()]
    out = []
    for row in reader:
        runs: list[Optional[float]] = []
        for c in run_cols:
            v = row[c]
            if v == "":
                break
            runs.append(None if v == "timeout" else float(v))
        out.append(BenchmarkRecord(
            variant=row["variant"], query=row["query"], engine=row["engine"],
            run_times_ms=runs,
            timed_out=row["timed_out"] == "true",
            rows=int(row["rows"]) if row["rows"] else None,
            digest=row["digest"] or None,
            error=row.get("error") or None,
        ))
    return out


# --------------------------------------------------------------------------
# SVG

SHAPES = ("circle", "square", "triangle", "diamond")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
SVG_NS = "http://www.w3.org/2000/svg"


def axis_label(variant_id: str) -> str:
    """``[xy]`` code for low/high cells, the variant id otherwise."""
    size, struct = split_variant(variant_id)
    level = {"0.1": "low", "0.9": "high"}.get(struct, struct)
    try:
        return cell_code(size, level)
    except ValueError:
        return variant_id


def _variant_sort_key(v: str):
    size, struct = split_variant(v)
    try:
        s = float(struct)
    except ValueError:
        s = {"low": 0.0, "high": 1.0}.get(struct, 2.0)
    return ({"low": 0, "high": 1}.get(size, 2), size, s, struct)


@dataclass
class ScatterSpec:
    x_order: Optional[list[str]] = None         # variant ids, left to right
    log_y: bool = True
    ceiling_ms: float = 5000.0
    title: str = "query time per dataset variant"
    width: int = 760
    height: int = 440


def _marker(parent, shape: str, x: float, y: float, r: float, color: str, hollow: bool, attrs: dict):
    style = {"fill": "none" if hollow else color, "stroke": color, "stroke-width": "1.5"}
    if shape == "circle":
        el = ET.SubElement(parent, "circle", cx=f"{x:.2f}", cy=f"{y:.2f}", r=f"{r:.2f}", **style)
    elif shape == "square":
        el = ET.SubElement(parent, "rect", x=f"{x - r:.2f}", y=f"{y - r:.2f}",
                           width=f"{2 * r:.2f}", height=f"{2 * r:.2f}", **style)
    elif shape == "triangle":
        pts = f"{x:.2f},{y - r * 1.15:.2f} {x - r:.2f},{y + r * 0.85:.2f} {x + r:.2f},{y + r * 0.85:.2f}"
        el = ET.SubElement(parent, "polygon", points=pts, **style)
    else:
        pts = f"{x:.2f},{y - r:.2f} {x + r:.2f},{y:.2f} {x:.2f},{y + r:.2f} {x - r:.2f},{y:.2f}"
        el = ET.SubElement(parent, "polygon", points=pts, **style)
    for k, v in attrs.items():
        el.set(k, v)
    return el


def emit_svg(records: Sequence[BenchmarkRecord], spec: ScatterSpec = ScatterSpec()) -> str:
    """Scatter of gmean per variant: color is the query, shape the engine.

    Timed-out cells sit on the dashed ceiling as hollow markers; errored cells
    are not plotted.
    """
    if not records:
        raise ValueError("no records to plot")
    plotted = [r for r in records if r.error is None and (r.timed_out or r.gmean_ms is not None)]
    variants = spec.x_order or sorted({r.variant for r in records}, key=_variant_sort_key)
    queries = sorted({r.query for r in records})
    engines = list(dict.fromkeys(r.engine for r in records))
    color = {q: PALETTE[i % len(PALETTE)] for i, q in enumerate(queries)}
    shape = {e: SHAPES[i % len(SHAPES)] for i, e in enumerate(engines)}

    W, H = spec.width, spec.height
    left, right, top, bottom = 70, 170, 40, 60
    pw, ph = W - left - right, H - top - bottom
    ceiling = spec.ceiling_ms
    values = [r.gmean_ms for r in plotted if r.gmean_ms is not None]
    if spec.log_y:
        lo_v = min([v for v in values if v > 0] + [ceiling / 10])
        y_lo = 10 ** math.floor(math.log10(max(lo_v, 1e-3)))
        y_hi = 10 ** math.ceil(math.log10(ceiling * 1.0001))

        def ypos(v):
            v = max(v, y_lo)
            return top + ph * (1 - (math.log10(v) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo)))
        ticks = [10 ** k for k in range(round(math.log10(y_lo)), round(math.log10(y_hi)) + 1)]
    else:
        y_lo, y_hi = 0.0, ceiling * 1.1

        def ypos(v):
            return top + ph * (1 - (v - y_lo) / (y_hi - y_lo))
        step = 10 ** math.floor(math.log10(y_hi / 5))
        ticks = [k * step for k in range(0, int(y_hi / step) + 1)][:12]

    svg = ET.Element("svg", xmlns=SVG_NS, width=str(W), height=str(H),
                     viewBox=f"0 0 {W} {H}", version="1.1")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(W), height=str(H), fill="white")
    title = ET.SubElement(svg, "text", x=str(left + pw / 2), y="22", **{"text-anchor": "middle",
                                                                         "font-size": "14"})
    title.text = spec.title
    axes = ET.SubElement(svg, "g", stroke="black", **{"stroke-width": "1"})
    ET.SubElement(axes, "line", x1=str(left), y1=str(top), x2=str(left), y2=str(top + ph))
    ET.SubElement(axes, "line", x1=str(left), y1=str(top + ph), x2=str(left + pw), y2=str(top + ph))
    labels = ET.SubElement(svg, "g", **{"font-size": "11", "font-family": "sans-serif"})
    for t in ticks:
        y = ypos(t)
        ET.SubElement(axes, "line", x1=str(left - 4), y1=f"{y:.2f}", x2=str(left), y2=f"{y:.2f}")
        lab = ET.SubElement(labels, "text", x=str(left - 7), y=f"{y + 4:.2f}", **{"text-anchor": "end"})
        lab.text = f"{t:g}"
    ylab = ET.SubElement(labels, "text", x="16", y=str(top + ph / 2),
                         transform=f"rotate(-90 16 {top + ph / 2})", **{"text-anchor": "middle"})
    ylab.text = "gmean time (ms" + (", log scale)" if spec.log_y else ")")

    n = max(len(variants), 1)
    slot = pw / n
    xs = {v: left + slot * (i + 0.5) for i, v in enumerate(variants)}
    for v in variants:
        lab = ET.SubElement(labels, "text", x=f"{xs[v]:.2f}", y=str(top + ph + 18), **{"text-anchor": "middle"})
        lab.text = axis_label(v)
    xl = ET.SubElement(labels, "text", x=str(left + pw / 2), y=str(H - 14), **{"text-anchor": "middle"})
    xl.text = "dataset variant (size / structuredness)"

    cy = ypos(ceiling)
    ET.SubElement(svg, "line", x1=str(left), y1=f"{cy:.2f}", x2=str(left + pw), y2=f"{cy:.2f}",
                  stroke="#aa0000", **{"stroke-dasharray": "6 4", "stroke-width": "1"})
    cl = ET.SubElement(labels, "text", x=str(left + pw - 2), y=f"{cy - 4:.2f}",
                       fill="#aa0000", **{"text-anchor": "end"})
    cl.text = f"timeout {ceiling:g} ms"

    points = ET.SubElement(svg, "g", id="points")
    spread = min(slot * 0.8, 60.0)
    lanes = max(len(queries) * len(engines), 1)
    for r in plotted:
        if r.variant not in xs:
            continue
        lane = queries.index(r.query) * len(engines) + engines.index(r.engine)
        x = xs[r.variant] - spread / 2 + spread * (lane + 0.5) / lanes
        y = cy if r.timed_out else ypos(r.gmean_ms)
        _marker(points, shape[r.engine], x, y, 4.5, color[r.query], r.timed_out, {
            "data-variant": r.variant, "data-query": r.query, "data-engine": r.engine,
            "data-timed-out": "true" if r.timed_out else "false",
            "class": "timeout" if r.timed_out else "point",
        })

    legend = ET.SubElement(svg, "g", id="legend", **{"font-size": "11", "font-family": "sans-serif"})
    lx, ly = left + pw + 20, top + 6
    head = ET.SubElement(legend, "text", x=str(lx), y=str(ly))
    head.text = "query (color)"
    for i, q in enumerate(queries):
        y = ly + 16 * (i + 1)
        ET.SubElement(legend, "rect", x=str(lx), y=str(y - 8), width="10", height="10", fill=color[q])
        t = ET.SubElement(legend, "text", x=str(lx + 16), y=str(y + 1))
        t.text = q
    ly2 = ly + 16 * (len(queries) + 2)
    head = ET.SubElement(legend, "text", x=str(lx), y=str(ly2))
    head.text = "engine (shape)"
    for i, e in enumerate(engines):
        y = ly2 + 16 * (i + 1)
        _marker(legend, shape[e], lx + 5, y - 3, 4.5, "black", False, {"class": "legend-shape"})
        t = ET.SubElement(legend, "text", x=str(lx + 16), y=str(y + 1))
        t.text = e
    y = ly2 + 16 * (len(engines) + 2)
    _marker(legend, "circle", lx + 5, y - 3, 4.5, "black", True, {"class": "legend-timeout"})
    t = ET.SubElement(legend, "text", x=str(lx + 16), y=str(y + 1))
    t.text = "timed out"
    ET.register_namespace("", SVG_NS)
    body = ET.tostring(svg, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


# --------------------------------------------------------------------------
# summary


def summarize(records: Sequence[BenchmarkRecord], classes: dict[str, Classification],
              errors: dict[str, str] = None) -> str:
    """Two blocks, HP-Plausible then HP-Dubious, one row per (query, engine)."""
    errors = errors or {}
    lines = []
    for perf in (PerformanceClass.HP_PLAUSIBLE, PerformanceClass.HP_DUBIOUS):
        lines.append(f"## {perf.value}")
        lines.append("")
        lines.append("| query | features | engine | cells | timed out | errors | min gmean ms | max gmean ms | spread |")
        lines.append("|---|---|---|---|---|---|---|---|---|")
        for qid in sorted(q for q, c in classes.items() if c.performance == perf):
            cls = classes[qid]
            by_engine: dict[str, list[BenchmarkRecord]] = {}
            for r in records:
                if r.query == qid:
                    by_engine.setdefault(r.engine, []).append(r)
            for eng, recs in sorted(by_engine.items()):
                vals = [r.gmean_ms for r in recs if r.gmean_ms is not None]
                tmo = sum(r.timed_out for r in recs)
                err = sum(r.error is not None for r in recs)
                lo = min(vals) if vals else None
                hi = max(vals) if vals else None
                spread = hi / lo if vals and lo > 0 else None
                lines.append(
                    f"| {qid} | {cls.feature_string()} | {eng} | {len(recs)} | {tmo} | {err} | "
                    f"{'' if lo is None else f'{lo:.3f}'} | {'' if hi is None else f'{hi:.3f}'} | "
                    f"{'' if spread is None else f'{spread:.2f}x'} |")
        lines.append("")
    if errors:
        lines.append("## Unclassified")
        lines.append("")
        for qid, msg in sorted(errors.items()):
            lines.append(f"- {qid}: {msg}")
        lines.append("")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# pipeline


@dataclass
class ExperimentOutcome:
    records: list[BenchmarkRecord]
    classes: dict[str, Classification]
    variants: list[DatasetVariant]
    failures: list[str]
    equivalence: object
    csv_path: Path
    svg_path: Optional[Path]
    summary_path: Path

    @property
    def ok(self) -> bool:
        return not self.failures


def _ratio_label(r: float) -> str:
    return f"{r:g}"


def run_experiment(cfg: ExperimentConfig, log=print) -> ExperimentOutcome:
    cfg.validate()
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    failures: list[str] = []
    t_start = time.monotonic()

    query_text = {qid: Path(p).read_text(encoding="utf-8") for qid, p in cfg.queries.items()}
    classes: dict[str, Classification] = {}
    class_errors: dict[str, str] = {}
    forms = {}
    for qid, text in query_text.items():
        try:
            forms[qid] = parse_query(text)
            classes[qid] = classify_query(forms[qid])
        except (QuerySyntaxError, UnsupportedFeature) as exc:
            class_errors[qid] = f"{type(exc).__name__}: {exc}"
            failures.append(f"classify {qid}: {exc}")

    protect_forms = []
    if cfg.protect:
        for qid, form in forms.items():
            if qid not in cfg.unprotected:
                protect_forms.append((qid, form))

    variants: list[DatasetVariant] = []
    for seed_spec in cfg.seeds:
        try:
            seed = seed_spec.load()
        except (OSError, ValueError) as exc:
            failures.append(f"load seed {seed_spec.name}: {exc}")
            continue
        usable = []
        for qid, form in protect_forms:
            try:
                protected_pairs([form], seed)
                usable.append(form)
            except Unprotectable as exc:
                log(f"warning: {qid} cannot be protected: {exc}")
        tp = iri(seed_spec.type_predicate) if seed_spec.type_predicate else None
        for ratio in cfg.ratios:
            label = _ratio_label(ratio)
            vdir = out / "variants" / seed_spec.name / label
            vdir.mkdir(parents=True, exist_ok=True)
            gen_cfg = GenerationConfig(ratio=ratio, size_fraction=cfg.size_fraction,
                                       epsilon=cfg.epsilon, budget_s=cfg.budget_s, type_predicate=tp)
            try:
                res = generate(seed, gen_cfg, usable)
            except Exception as exc:            # recorded, the remaining cells still run
                failures.append(f"generate {seed_spec.name}@{label}: {type(exc).__name__}: {exc}")
                (vdir / "provenance.json").write_text(json.dumps({"error": str(exc)}, indent=2))
                continue
            save_ntriples(res.dataset, vdir / "data.nt")
            prov = res.provenance()
            prov["ratio"] = ratio
            prov["analysis"] = {k: (float(v) if isinstance(v, Fraction) else v)
                                for k, v in analyze(res.dataset, tp).items()}
            (vdir / "provenance.json").write_text(json.dumps(prov, indent=2, sort_keys=True))
            variants.append(DatasetVariant(seed_spec.name, label, str(vdir / "data.nt"), res.dataset))
            log(f"variant {seed_spec.name}/{label}: CH {prov['recomputed_ch']:.4f} "
                f"(target {prov['target_ch']:.4f}) size {prov['size']} {prov['solver_status']}")

    runnable = {qid: query_text[qid] for qid in forms}
    endpoints = []
    for ep in cfg.endpoints:
        endpoints.append(EndpointSpec(ep.label, ep.kind, ep.url, cfg.timeout_ms, ep.options))
    records = run_suite(endpoints, variants, runnable, cfg.repeats, cfg.timeout_ms)
    for r in records:
        if r.error:
            failures.append(f"run {r.query} on {r.engine}@{r.variant}: {r.error}")

    checked = {qid for qid, _ in protect_forms}
    eq = verify_equivalence([r for r in records if r.query in checked])
    for v in eq.violations:
        failures.append(f"result mismatch for {v.query} on {v.engine}: {v.variant_a} vs {v.variant_b}")

    csv_path = out / "records.csv"
    csv_path.write_text(emit_csv(records), encoding="utf-8")
    svg_path = None
    if records:
        svg_path = out / "scatter.svg"
        svg_path.write_text(emit_svg(records, ScatterSpec(log_y=cfg.log_scale, ceiling_ms=cfg.timeout_ms)),
                            encoding="utf-8")
    summary = summarize(records, classes, class_errors)
    summary += f"\nequivalence: {eq.groups} groups, {len(eq.violations)} violations, "
    summary += f"{len(eq.unverified)} unverified cells\n"
    summary += f"elapsed: {time.monotonic() - t_start:.1f} s\n"
    if failures:
        summary += "\n## Failures\n\n" + "\n".join(f"- {f}" for f in failures) + "\n"
    summary_path = out / "summary.md"
    summary_path.write_text(summary, encoding="utf-8")
    return ExperimentOutcome(records, classes, variants, failures, eq, csv_path, svg_path, summary_path)


__all__ = [
    "ConfigError", "ExperimentConfig", "ExperimentOutcome", "ScatterSpec", "SeedSpec",
    "emit_csv", "emit_svg", "load_csv", "output_root", "parse_duration", "run_experiment",
    "summarize",
]

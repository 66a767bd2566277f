"""Left-deep plan search over pattern orders and join algorithms.

Cost of a plan is the sum over its joins of ``|left| + |right| + |out|``
plus an algorithm-specific term: nested loop pays the full probe product,
hash pays for building the right side (more when it exceeds the memory
budget) and merge pays for sorting any input not already in key order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

from ..sparql.ast import Var
from .index import EncodedPattern, IndexedStore, choose_order
from .joins import ALGORITHMS, JoinAlgorithm

MAX_EXHAUSTIVE = 6
HASH_BUILD = 1.5
SPILL_FACTOR = 4.0
DEFAULT_MEMORY_ROWS = 1_000_000


class TooManyPatterns(ValueError):
    pass


@dataclass(frozen=True)
class PlannerConfig:
    mode: str = "greedy"                    # "greedy" or "exhaustive"
    algorithm: Optional[str] = None         # force one algorithm, None picks
    memory_rows: int = DEFAULT_MEMORY_ROWS
    noise: float = 1.0                      # multiplicative misestimation factor
    noise_seed: int = 0


@dataclass(frozen=True)
class PlanStep:
    pattern: int                        # index into the planned pattern list
    order: str                          # index used for the leaf scan
    algorithm: JoinAlgorithm            # how the step joins the running result
    sort_on: tuple[str, ...] = ()       # leaf scan ordering requested
    est_rows: float = 0.0               # estimated output after this step


@dataclass
class PhysicalPlan:
    steps: list[PlanStep]
    cost: float
    candidates: int = 1
    k: int = len(ALGORITHMS)

    @property
    def n(self) -> int:
        return len(self.steps)

    @property
    def order(self) -> list[int]:
        return [s.pattern for s in self.steps]

    def describe(self) -> str:
        if not self.steps:
            return "empty"
        parts = [f"scan#{self.steps[0].pattern}[{self.steps[0].order}]"]
        for s in self.steps[1:]:
            parts.append(f"{s.algorithm.value}(scan#{s.pattern}[{s.order}])")
        return " > ".join(parts)


@dataclass
class _Estimates:
    card: list[float]
    vars: list[list[str]]
    ndv: list[dict[str, float]]
    positions: list[dict[str, int]] = field(default_factory=list)


def _estimates(store: IndexedStore, patterns: list[EncodedPattern], cfg: PlannerConfig) -> _Estimates:
    rng = random.Random(cfg.noise_seed)
    card, vs, ndv, pos = [], [], [], []
    for tp in patterns:
        c = float(store.count(tp))
        if cfg.noise != 1.0 and c > 0:
            c *= cfg.noise ** rng.uniform(-1.0, 1.0)
        card.append(c)
        names = tp.vars()
        vs.append(names)
        first = {}
        for i, x in enumerate(tp):
            if isinstance(x, Var):
                first.setdefault(x.name, i)
        pos.append(first)
        d = {}
        for v, i in first.items():
            d[v] = max(1.0, min(c, float(store.distinct_values(tp, i)))) if c else 1.0
        ndv.append(d)
    return _Estimates(card, vs, ndv, pos)


@dataclass(frozen=True)
class _State:
    rows: float
    ndv: tuple                  # ((var, ndv), ...)
    sorted_on: tuple[str, ...]
    leaf: bool = False          # a bare scan can still pick any index order


def _join_estimate(left: _State, est: _Estimates, j: int) -> tuple[float, tuple]:
    lnd = dict(left.ndv)
    rnd = est.ndv[j]
    out = left.rows * est.card[j]
    for v in est.vars[j]:
        if v in lnd:
            out /= max(lnd[v], rnd[v], 1.0)
    merged = dict(lnd)
    for v, d in rnd.items():
        merged[v] = min(merged.get(v, d), d)
    out_nd = tuple(sorted((v, max(1.0, min(d, out))) for v, d in merged.items()))
    return out, out_nd


def _sort_cost(n: float) -> float:
    return n * math.log2(n + 1.0)


def _merge_key(sorted_on: tuple[str, ...], shared: list[str]) -> Optional[tuple[str, ...]]:
    k = len(shared)
    prefix = sorted_on[:k]
    if len(prefix) == k and set(prefix) == set(shared):
        return tuple(prefix)
    return None


def _step_cost(left: _State, right_rows: float, out: float, algo: JoinAlgorithm,
               shared: list[str], cfg: PlannerConfig) -> tuple[float, tuple[str, ...]]:
    """Cost of one join and the sort order of its output."""
    base = left.rows + right_rows + out
    if not shared or algo == JoinAlgorithm.NESTED_LOOP:
        return base + left.rows * right_rows, left.sorted_on
    if algo == JoinAlgorithm.HASH:
        build = HASH_BUILD * right_rows
        if right_rows > cfg.memory_rows:
            build *= SPILL_FACTOR
        return base + build, left.sorted_on
    if left.leaf:
        return base, tuple(shared)
    key = _merge_key(left.sorted_on, shared)
    if key is None:
        return base + _sort_cost(left.rows), tuple(shared)
    # the right side is a leaf scan and is always read in key order
    return base, key


def _leaf_state(est: _Estimates, j: int) -> _State:
    return _State(est.card[j], tuple(sorted(est.ndv[j].items())), tuple(est.vars[j]), leaf=True)


def _scan_order(tp: EncodedPattern, sort_on: tuple[str, ...]) -> str:
    pos = []
    for v in sort_on:
        for i, x in enumerate(tp):
            if isinstance(x, Var) and x.name == v:
                pos.append(i)
                break
    return choose_order(tp.bound_positions(), tuple(pos))


def _walk(patterns, est, seq, cfg) -> PhysicalPlan:
    """Cost and scan orders for a fixed (pattern, algorithm) sequence."""
    j0, a0 = seq[0]
    state = _leaf_state(est, j0)
    steps = [[j0, a0, (), state.rows]]
    total = 0.0
    for j, algo in seq[1:]:
        shared = [v for v in est.vars[j] if v in dict(state.ndv)]
        out, nd = _join_estimate(state, est, j)
        c, sorted_on = _step_cost(state, est.card[j], out, algo, shared, cfg)
        total += c
        sort_on: tuple[str, ...] = ()
        if algo == JoinAlgorithm.MERGE and shared:
            sort_on = sorted_on
            if state.leaf:
                steps[0][2] = sorted_on
        steps.append([j, algo, sort_on, out])
        state = _State(out, nd, sorted_on)
    plan_steps = [PlanStep(j, _scan_order(patterns[j], so), algo, so, rows)
                  for j, algo, so, rows in steps]
    return PhysicalPlan(plan_steps, total)


def _pick_algorithm(state: _State, right_rows: float, shared: list[str], cfg: PlannerConfig) -> JoinAlgorithm:
    if cfg.algorithm:
        return JoinAlgorithm(cfg.algorithm)
    if shared and (state.leaf or _merge_key(state.sorted_on, shared) is not None):
        return JoinAlgorithm.MERGE
    if shared and min(state.rows, right_rows) <= cfg.memory_rows:
        return JoinAlgorithm.HASH
    return JoinAlgorithm.NESTED_LOOP


def greedy_plan(store: IndexedStore, patterns: list[EncodedPattern],
                cfg: PlannerConfig = PlannerConfig()) -> PhysicalPlan:
    """Cheapest pattern first, then the connected pattern with the smallest
    estimated join result; ties go to the lower pattern index."""
    est = _estimates(store, patterns, cfg)
    remaining = list(range(len(patterns)))
    first = min(remaining, key=lambda j: (est.card[j], j))
    remaining.remove(first)
    seq = [(first, JoinAlgorithm(cfg.algorithm) if cfg.algorithm else JoinAlgorithm.NESTED_LOOP)]
    state = _leaf_state(est, first)
    while remaining:
        bound = {v for v, _ in state.ndv}
        connected = [j for j in remaining if bound & set(est.vars[j])]
        if connected:
            j = min(connected, key=lambda j: (_join_estimate(state, est, j)[0], j))
        else:
            j = min(remaining, key=lambda j: (est.card[j], j))
        remaining.remove(j)
        shared = [v for v in est.vars[j] if v in bound]
        algo = _pick_algorithm(state, est.card[j], shared, cfg)
        out, nd = _join_estimate(state, est, j)
        _, sorted_on = _step_cost(state, est.card[j], out, algo, shared, cfg)
        seq.append((j, algo))
        state = _State(out, nd, sorted_on)
    return _walk(patterns, est, seq, cfg)


def exhaustive_plan(store: IndexedStore, patterns: list[EncodedPattern],
                    cfg: PlannerConfig = PlannerConfig()) -> PhysicalPlan:
    """Minimum-cost left-deep plan over all n! orders and k^n algorithm choices.

    The first leaf also carries an algorithm slot (its join with the unit
    table, free of cost), so exactly n!*k^n candidates are visited.
    """
    n = len(patterns)
    if n > MAX_EXHAUSTIVE:
        raise TooManyPatterns(f"exhaustive planning supports at most {MAX_EXHAUSTIVE} patterns, got {n}")
    est = _estimates(store, patterns, cfg)
    algos = [JoinAlgorithm(cfg.algorithm)] if cfg.algorithm else list(ALGORITHMS)
    best_cost = math.inf
    best_seq: list = []
    visited = 0
    seq: list = []
    used = [False] * n

    def dfs(state: _State, cost: float):
        nonlocal visited, best_cost, best_seq
        if len(seq) == n:
            visited += 1
            if cost < best_cost:
                best_cost, best_seq = cost, list(seq)
            return
        bound = dict(state.ndv)
        for j in range(n):
            if used[j]:
                continue
            shared = [v for v in est.vars[j] if v in bound]
            out, nd = _join_estimate(state, est, j)
            used[j] = True
            for algo in algos:
                c, sorted_on = _step_cost(state, est.card[j], out, algo, shared, cfg)
                seq.append((j, algo))
                dfs(_State(out, nd, sorted_on), cost + c)
                seq.pop()
            used[j] = False

    for j in range(n):
        used[j] = True
        for a0 in algos:
            seq.append((j, a0))
            dfs(_leaf_state(est, j), 0.0)
            seq.pop()
        used[j] = False
    result = _walk(patterns, est, best_seq, cfg)
    result.candidates = visited
    result.k = len(algos)
    return result


def candidate_count(n: int, k: int = len(ALGORITHMS)) -> int:
    return math.factorial(n) * k ** n


def plan(store: IndexedStore, patterns: list,
         cfg: PlannerConfig = PlannerConfig()) -> PhysicalPlan:
    if not patterns:
        raise ValueError("cannot plan an empty pattern list")
    patterns = [store.encode_pattern(p) for p in patterns]
    if cfg.mode == "exhaustive":
        return exhaustive_plan(store, patterns, cfg)
    if cfg.mode == "greedy":
        return greedy_plan(store, patterns, cfg)
    raise ValueError(f"unknown planning mode {cfg.mode!r}")


def plan_cost(store: IndexedStore, patterns: list, seq, cfg: PlannerConfig = PlannerConfig()) -> float:
    """Cost-model value of an explicit (pattern, algorithm) sequence."""
    patterns = [store.encode_pattern(p) for p in patterns]
    est = _estimates(store, patterns, cfg)
    return _walk(patterns, est, [(j, JoinAlgorithm(a)) for j, a in seq], cfg).cost

"""Turning a solver answer into triples: pair deletion, then size trimming."""

from __future__ import annotations

import heapq
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from ..rdf import Dataset
from ..structuredness import dataset_coherence
from .problem import GenerationProblem
from .solver import GenerationSolution, Status

CONSISTENCY_SLACK = Fraction(1, 100)


class ConsistencyError(RuntimeError):
    """Recomputed coherence left the tolerated band around the target."""


def deletion_plan(problem: GenerationProblem, solution: GenerationSolution,
                  rng: Optional[random.Random] = None) -> set[tuple[int, int]]:
    """Pick the (subject, predicate) pairs to drop so each variable lands on its value.

    While the projected final size is above target the heaviest candidate
    goes first, otherwise the lightest; ties fall to the lower subject id.
    With ``rng`` candidates are drawn at random instead.
    """
    if solution.status not in (Status.OPTIMAL, Status.FEASIBLE, Status.TIMEOUT):
        raise ValueError(f"cannot apply a solution with status {solution.status}")
    pending = []
    for k, (key, x) in enumerate(zip(problem.keys, solution.x)):
        n_del = problem.upper[k] - x
        if n_del > len(problem.candidates[k]):
            raise ValueError(f"variable {key} asks for {n_del} deletions, only "
                             f"{len(problem.candidates[k])} candidates are free")
        if n_del > 0:
            pending.append((k, n_del))

    size = problem.seed_size
    expected = sum(float(problem.multiplicity[k]) * n for k, n in pending)
    target = problem.target_size
    dropped: set[tuple[int, int]] = set()
    for k, n_del in pending:
        _, p = problem.keys[k]
        m = float(problem.multiplicity[k])
        pool = list(problem.candidates[k])
        heavy = [(-c, s, i) for i, (s, c) in enumerate(pool)]
        light = [(c, s, i) for i, (s, c) in enumerate(pool)]
        heapq.heapify(heavy)
        heapq.heapify(light)
        taken = [False] * len(pool)
        for _ in range(n_del):
            if rng is not None:
                idx = rng.choice([i for i, t in enumerate(taken) if not t])
            else:
                heap = heavy if size - expected > target else light
                while taken[heap[0][2]]:
                    heapq.heappop(heap)
                idx = heapq.heappop(heap)[2]
            taken[idx] = True
            s, count = pool[idx]
            dropped.add((s, p))
            size -= count
            expected -= m
    return dropped


def apply_solution(seed: Dataset, problem: GenerationProblem, solution: GenerationSolution,
                   rng: Optional[random.Random] = None, check: bool = True) -> Dataset:
    """Delete every triple of the chosen pairs; the result is a subset of ``seed``."""
    dropped = deletion_plan(problem, solution, rng)
    kept = [t for t in seed.triples if (t[0], t[1]) not in dropped]
    out = seed.subset(kept)
    if check:
        tp = problem.type_predicate
        ch = dataset_coherence(out, seed.dictionary.term(tp)) if tp is not None else Fraction(0)
        if abs(ch - problem.target_ch) > problem.epsilon + CONSISTENCY_SLACK:
            raise ConsistencyError(
                f"coherence {float(ch):.4f} outside {float(problem.target_ch):.4f}"
                f" +/- {float(problem.epsilon + CONSISTENCY_SLACK):.4f}")
    return out


@dataclass
class SizeAdjustment:
    dataset: Dataset
    reached: bool
    removed: int

    @property
    def cannot_reach(self) -> bool:
        return not self.reached


def adjust_size(dataset: Dataset, target_size: int, protected: Iterable[tuple[int, int]] = (),
                type_predicate: Optional[int] = None, tolerance: float = 0.01) -> SizeAdjustment:
    """Shrink towards ``target_size`` using removals that leave every OC unchanged.

    Only surplus objects inside a (subject, predicate) group are removed, so
    every group keeps at least one triple.  Groups of typed instances go
    first, then untyped subjects; protected pairs and type triples are never
    touched.
    """
    protected = set(protected)
    size = len(dataset.triples)
    if size <= target_size:
        return SizeAdjustment(dataset, size >= target_size * (1 - tolerance), 0)
    typed = {s for s, p, _ in dataset.triples if p == type_predicate}
    groups: dict[tuple[int, int], list[int]] = defaultdict(list)
    for idx, (s, p, _) in enumerate(dataset.triples):
        if p == type_predicate or (s, p) in protected:
            continue
        groups[(s, p)].append(idx)

    def phase(keys):
        return sorted(keys, key=lambda k: (-len(groups[k]), k))

    surplus = [k for k, v in groups.items() if len(v) > 1]
    order = phase([k for k in surplus if k[0] in typed]) + phase([k for k in surplus if k[0] not in typed])
    drop: set[int] = set()
    excess = size - target_size
    for key in order:
        if excess <= 0:
            break
        members = groups[key]
        # keep the first-seen triple of the group, drop from the end
        for idx in reversed(members[1:]):
            if excess <= 0:
                break
            drop.add(idx)
            excess -= 1
    kept = [t for i, t in enumerate(dataset.triples) if i not in drop]
    reached = len(kept) <= target_size * (1 + tolerance)
    return SizeAdjustment(dataset.subset(kept), reached, len(drop))

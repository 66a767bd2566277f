"""Structuredness-controlled dataset generation by triple deletion."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from ..rdf import Dataset, Term
from ..structuredness import dataset_coherence
from .lpfile import export_lp, import_lp
from .problem import DEFAULT_BUDGET_S, DEFAULT_EPSILON, GenerationProblem, InfeasibleTarget, build_problem
from .protect import Unprotectable, protected_pairs
from .rewrite import ConsistencyError, SizeAdjustment, adjust_size, apply_solution
from .solver import GenerationSolution, InfeasibleProblem, SolverTimeout, Status, brute_force, solve


@dataclass(frozen=True)
class GenerationConfig:
    ratio: float
    size_fraction: float = 0.7
    target_size: Optional[int] = None           # overrides size_fraction
    epsilon: Fraction = DEFAULT_EPSILON
    budget_s: float = DEFAULT_BUDGET_S
    gap: float = 0.5                            # absolute optimality tolerance, triples
    rel_gap: float = 1e-4                       # ... and relative to the target size
    type_predicate: Optional[Term] = None
    keep_properties: bool = True
    random_seed: Optional[int] = None           # None picks instances deterministically
    adjust: bool = True

    def size_for(self, seed_size: int) -> int:
        if self.target_size is not None:
            return self.target_size
        return int(round(self.size_fraction * seed_size))


@dataclass
class GenerationResult:
    dataset: Dataset
    problem: GenerationProblem
    solution: GenerationSolution
    coherence: Fraction
    adjustment: Optional[SizeAdjustment] = None
    protected: set = field(default_factory=set)

    @property
    def size(self) -> int:
        return len(self.dataset.triples)

    @property
    def size_reached(self) -> bool:
        return self.adjustment.reached if self.adjustment is not None else True

    def provenance(self) -> dict:
        return {
            "target_ch": float(self.problem.target_ch),
            "recomputed_ch": float(self.coherence),
            "predicted_ch": float(self.solution.predicted_ch),
            "seed_ch": float(self.problem.seed_ch),
            "target_size": self.problem.target_size,
            "size": self.size,
            "seed_size": self.problem.seed_size,
            "solver_status": self.solution.status.value,
            "solver_objective": self.solution.objective,
            "solver_nodes": self.solution.nodes,
            "solver_seconds": round(self.solution.elapsed_s, 4),
            "variables": len(self.problem.keys),
            "protected_pairs": len(self.protected),
            "size_reached": self.size_reached,
        }


def generate(seed: Dataset, config: GenerationConfig,
             protected_queries: Iterable = ()) -> GenerationResult:
    """Solve, delete, then trim: one variant of ``seed`` at ``config.ratio``."""
    protected = protected_pairs(protected_queries, seed)
    target_size = config.size_for(len(seed.triples))
    problem = build_problem(seed, config.ratio, target_size, protected, config.epsilon,
                            config.budget_s, config.type_predicate, config.keep_properties)
    solution = solve(problem, gap=config.gap, rel_gap=config.rel_gap)
    rng = random.Random(config.random_seed) if config.random_seed is not None else None
    out = apply_solution(seed, problem, solution, rng=rng)
    adjustment = None
    if config.adjust:
        adjustment = adjust_size(out, target_size, protected, problem.type_predicate)
        out = adjustment.dataset
    tp = problem.type_predicate
    ch = dataset_coherence(out, seed.dictionary.term(tp)) if tp is not None else Fraction(0)
    return GenerationResult(out, problem, solution, ch, adjustment, protected)


__all__ = [
    "ConsistencyError", "GenerationConfig", "GenerationProblem", "GenerationResult",
    "GenerationSolution", "InfeasibleProblem", "InfeasibleTarget", "SizeAdjustment",
    "SolverTimeout", "Status", "Unprotectable", "adjust_size", "apply_solution",
    "brute_force", "build_problem", "export_lp", "generate", "import_lp", "protected_pairs",
    "solve",
]

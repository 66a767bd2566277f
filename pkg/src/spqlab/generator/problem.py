"""The integer program behind structuredness-controlled dataset synthesis.

One integer variable per (type, property) pair counts the instances of the
type that keep the property.  Coverage denominators and type weights are
frozen at their seed values, so the coherence of the output is linear in
the variables and the target band is a pair of linear rows.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from ..rdf import Dataset, Term
from ..structuredness import (
    EmptyTypeSystem,
    TypeSystem,
    coherence,
    extract_type_system,
    type_weights,
)

DEFAULT_EPSILON = Fraction(1, 200)
DEFAULT_BUDGET_S = 120.0


class InfeasibleTarget(ValueError):
    pass


@dataclass
class GenerationProblem:
    keys: list[tuple[int, int]]                 # (type id, property id) per variable
    lower: list[int]
    upper: list[int]                            # OC(p, T) at the seed
    coef: list[Fraction]                        # WT(T) / (|P(T)| * |I(T)|)
    ch_constant: Fraction                       # weight of types with no properties
    multiplicity: list[Fraction]                # triples per freely deletable retaining instance
    forced: list[int]                           # retaining instances that can never be deleted
    fixed_triples: int                          # triples no variable can touch
    target_ch: Fraction
    target_size: int
    epsilon: Fraction = DEFAULT_EPSILON
    budget_s: float = DEFAULT_BUDGET_S
    seed_ch: Fraction = Fraction(0)
    seed_size: int = 0
    protected: frozenset[tuple[int, int]] = frozenset()
    # free (subject, triple count) candidates per variable, sorted by subject id
    candidates: list[list[tuple[int, int]]] = field(default_factory=list)
    type_predicate: Optional[int] = None

    def __len__(self):
        return len(self.keys)

    @property
    def ch_low(self) -> Fraction:
        return self.target_ch - self.epsilon

    @property
    def ch_high(self) -> Fraction:
        return self.target_ch + self.epsilon

    @property
    def size_constant(self) -> Fraction:
        """``c`` in ``size(x) = sum m*x + c``."""
        return self.fixed_triples - sum((m * f for m, f in zip(self.multiplicity, self.forced)), Fraction(0))

    def predicted_ch(self, x: Iterable[int]) -> Fraction:
        return self.ch_constant + sum((a * v for a, v in zip(self.coef, x)), Fraction(0))

    def predicted_size(self, x: Iterable[int]) -> Fraction:
        return self.size_constant + sum((m * v for m, v in zip(self.multiplicity, x)), Fraction(0))

    def objective(self, x: Iterable[int]) -> Fraction:
        return abs(self.predicted_size(x) - self.target_size)

    def is_feasible(self, x: list[int]) -> bool:
        if any(not lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper)):
            return False
        return self.ch_low <= self.predicted_ch(x) <= self.ch_high

    def identity(self) -> list[int]:
        return list(self.upper)


def _free_subjects(ts: TypeSystem) -> set[int]:
    seen: dict[int, int] = defaultdict(int)
    for t in ts.types:
        for s in ts.instances[t]:
            seen[s] += 1
    return {s for s, n in seen.items() if n == 1}


def build_problem(
    seed: Dataset,
    ratio,
    target_size: int,
    protected: Iterable[tuple[int, int]] = (),
    epsilon=DEFAULT_EPSILON,
    budget_s: float = DEFAULT_BUDGET_S,
    type_predicate: Optional[Term] = None,
    keep_properties: bool = True,
    type_system: Optional[TypeSystem] = None,
) -> GenerationProblem:
    """Build the deletion program for ``target_ch = ratio * CH(seed)``.

    ``protected`` is a set of (subject id, predicate id) pairs that must keep
    all their triples.  Instances with more than one type are protected
    implicitly, since deleting from them would move several variables at
    once.  With ``keep_properties`` every variable keeps at least one
    instance so that no P(T) shrinks and the frozen denominators stay exact.
    """
    ratio = Fraction(ratio).limit_denominator(10**9)
    epsilon = Fraction(epsilon).limit_denominator(10**12)
    if not 0 < ratio <= 1:
        raise ValueError("ratio must be in (0, 1]")
    ts = type_system or extract_type_system(seed, type_predicate)
    if ts.is_empty:
        raise EmptyTypeSystem("seed has no typed instances")
    protected = frozenset(protected)
    tp = ts.type_predicate
    report = coherence(ts)
    weights = type_weights(ts)

    single = _free_subjects(ts)
    type_of = {s: t for t in ts.types for s in ts.instances[t] if s in single}

    pair_count: dict[tuple[int, int], int] = defaultdict(int)
    for s, p, o in seed.triples:
        if p != tp:
            pair_count[(s, p)] += 1

    # triples of free pairs, grouped by variable
    free: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    fixed = len(seed.triples)
    for (s, p), n in pair_count.items():
        t = type_of.get(s)
        if t is None or (s, p) in protected:
            continue
        free[(t, p)].append((s, n))
        fixed -= n

    keys, lower, upper, coef, mult, forced, cands = [], [], [], [], [], [], []
    ch_constant = Fraction(0)
    for t in ts.types:
        props = ts.properties[t]
        if not props:
            ch_constant += weights[t]
            continue
        denom = len(props) * len(ts.instances[t])
        for p in sorted(props):
            oc = ts.occurrences[(t, p)]
            fr = sorted(free.get((t, p), ()))
            n_forced = oc - len(fr)
            lo = n_forced
            if keep_properties:
                lo = max(lo, 1)
            free_triples = sum(n for _, n in fr)
            keys.append((t, p))
            lower.append(lo)
            upper.append(oc)
            coef.append(weights[t] / denom)
            mult.append(Fraction(free_triples, len(fr)) if fr else Fraction(1))
            forced.append(n_forced)
            cands.append(fr)

    target_ch = ratio * report.coherence
    problem = GenerationProblem(
        keys=keys, lower=lower, upper=upper, coef=coef, ch_constant=ch_constant,
        multiplicity=mult, forced=forced, fixed_triples=fixed,
        target_ch=target_ch, target_size=int(target_size), epsilon=epsilon,
        budget_s=budget_s, seed_ch=report.coherence, seed_size=len(seed.triples),
        protected=protected, candidates=cands, type_predicate=tp,
    )
    if problem.predicted_ch(lower) > problem.ch_high:
        raise InfeasibleTarget(
            f"protected pairs alone give coherence {float(problem.predicted_ch(lower)):.4f}"
            f" > target band upper {float(problem.ch_high):.4f}")
    return problem

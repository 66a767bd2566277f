"""Branch and bound for the two-row deletion program.

The program is

    minimise |sum_i m_i x_i - R|
    s.t.     L <= sum_i a_i x_i <= U,   lo_i <= x_i <= hi_i,   x_i integer

with every ``a_i`` and ``m_i`` strictly positive.  Its LP relaxation over a
box reduces to two fractional knapsacks (largest and smallest reachable
``m.x`` inside the band), which gives an O(n) node bound.
"""

from __future__ import annotations

import itertools
import math
import sys
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .problem import GenerationProblem

_BAND_GUARD = 1e-12


class Status(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    TIMEOUT = "Timeout"
    INFEASIBLE = "Infeasible"


class InfeasibleProblem(ValueError):
    pass


class SolverTimeout(TimeoutError):
    """Budget exhausted before any feasible point was found."""


@dataclass
class GenerationSolution:
    x: list[int]
    predicted_ch: Fraction
    predicted_size: Fraction
    status: Status
    objective: float
    nodes: int = 0
    elapsed_s: float = 0.0


@dataclass
class IntegerProgram:
    """Float view of the program; the solver only sees this."""

    a: list[float]
    m: list[float]
    lo: list[int]
    hi: list[int]
    band_lo: float
    band_hi: float
    target: float

    @classmethod
    def from_problem(cls, p: GenerationProblem) -> "IntegerProgram":
        return cls(
            a=[float(v) for v in p.coef],
            m=[float(v) for v in p.multiplicity],
            lo=list(p.lower),
            hi=list(p.upper),
            band_lo=float(p.ch_low - p.ch_constant) + _BAND_GUARD,
            band_hi=float(p.ch_high - p.ch_constant) - _BAND_GUARD,
            target=float(p.target_size - p.size_constant),
        )

    def objective(self, x: Sequence[int]) -> float:
        return abs(sum(mi * xi for mi, xi in zip(self.m, x)) - self.target)

    def feasible(self, x: Sequence[int]) -> bool:
        if any(not lo <= v <= hi for v, lo, hi in zip(x, self.lo, self.hi)):
            return False
        u = sum(ai * xi for ai, xi in zip(self.a, x))
        return self.band_lo <= u <= self.band_hi


def _relaxation(ip: IntegerProgram, free: Sequence[int], a0: float, m0: float):
    """Range of ``m.x`` reachable by the LP relaxation, or None if the band is unreachable.

    ``free`` must be sorted by ``m/a`` descending.
    """
    a, m, lo, hi = ip.a, ip.m, ip.lo, ip.hi
    u_lo = a0
    v_lo = m0
    u_span = 0.0
    for i in free:
        u_lo += a[i] * lo[i]
        v_lo += m[i] * lo[i]
        u_span += a[i] * (hi[i] - lo[i])
    L, U = ip.band_lo, ip.band_hi
    if u_lo > U or u_lo + u_span < L:
        return None
    # largest m.x with a.x <= U: take best ratio first
    u, v = u_lo, v_lo
    for i in free:
        room = a[i] * (hi[i] - lo[i])
        if u + room <= U:
            u += room
            v += m[i] * (hi[i] - lo[i])
        else:
            v += (U - u) / a[i] * m[i]
            break
    v_max = v
    # smallest m.x with a.x >= L: take worst ratio first
    u, v = u_lo, v_lo
    if u < L:
        for i in reversed(free):
            room = a[i] * (hi[i] - lo[i])
            if u + room < L:
                u += room
                v += m[i] * (hi[i] - lo[i])
            else:
                v += (L - u) / a[i] * m[i]
                break
    return v, v_max


def lp_bound(ip: IntegerProgram, free: Sequence[int], a0: float = 0.0, m0: float = 0.0) -> Optional[float]:
    r = _relaxation(ip, free, a0, m0)
    if r is None:
        return None
    v_min, v_max = r
    return max(0.0, v_min - ip.target, ip.target - v_max)


def _fractional_point(ip: IntegerProgram, order: Sequence[int]) -> list[float]:
    """A relaxed point whose ``m.x`` is as close to the target as the band allows."""
    n = len(ip.a)
    L, U = ip.band_lo, ip.band_hi

    def fill(cap, ranked):
        x = [float(v) for v in ip.lo]
        u = sum(ip.a[i] * x[i] for i in range(n))
        for i in ranked:
            room = ip.a[i] * (ip.hi[i] - ip.lo[i])
            if u + room <= cap:
                x[i] = ip.hi[i]
                u += room
            else:
                x[i] += (cap - u) / ip.a[i]
                break
        return x

    hi_pt = fill(U, order)
    lo_pt = fill(L, list(reversed(order)))
    v_hi = sum(mi * xi for mi, xi in zip(ip.m, hi_pt))
    v_lo = sum(mi * xi for mi, xi in zip(ip.m, lo_pt))
    if v_hi <= v_lo or ip.target >= v_hi:
        return hi_pt
    if ip.target <= v_lo:
        return lo_pt
    lam = (ip.target - v_lo) / (v_hi - v_lo)
    return [lam * h + (1 - lam) * l for h, l in zip(hi_pt, lo_pt)]


def greedy_round(ip: IntegerProgram, order: Sequence[int]) -> Optional[list[int]]:
    """Warm start: round a relaxed point with error diffusion, then repair by unit moves."""
    n = len(ip.a)
    frac = _fractional_point(ip, order)
    x = []
    err = 0.0
    for i in range(n):
        f = frac[i]
        lo_v, hi_v = math.floor(f), math.ceil(f)
        e_lo = err + ip.m[i] * (lo_v - f)
        e_hi = err + ip.m[i] * (hi_v - f)
        if abs(e_lo) <= abs(e_hi):
            x.append(max(ip.lo[i], lo_v))
            err = e_lo
        else:
            x.append(min(ip.hi[i], hi_v))
            err = e_hi
    u = sum(ip.a[i] * x[i] for i in range(n))
    v = sum(ip.m[i] * x[i] for i in range(n))

    # band repair
    by_a = sorted(range(n), key=lambda i: -ip.a[i])
    guard = 0
    overshot = 0
    while (u < ip.band_lo or u > ip.band_hi) and guard < 100000:
        guard += 1
        moved = False
        if u < ip.band_lo:
            for i in by_a:
                if x[i] < ip.hi[i] and u + ip.a[i] <= ip.band_hi:
                    x[i] += 1
                    u += ip.a[i]
                    v += ip.m[i]
                    moved = True
                    break
        else:
            for i in by_a:
                if x[i] > ip.lo[i] and u - ip.a[i] >= ip.band_lo:
                    x[i] -= 1
                    u -= ip.a[i]
                    v -= ip.m[i]
                    moved = True
                    break
        if not moved:
            direction = 1 if u < ip.band_lo else -1
            if overshot == -direction:
                return None
            overshot = direction
            # overshooting step; take the smallest coefficient available
            cands = [i for i in range(n) if (x[i] < ip.hi[i] if u < ip.band_lo else x[i] > ip.lo[i])]
            if not cands:
                return None
            i = min(cands, key=lambda k: ip.a[k])
            step = 1 if u < ip.band_lo else -1
            x[i] += step
            u += step * ip.a[i]
            v += step * ip.m[i]
    if not ip.band_lo <= u <= ip.band_hi:
        return None

    # size improvement by single and paired unit moves that stay in the band
    for _ in range(10000):
        diff = v - ip.target
        best = (abs(diff), None)
        for i in range(n):
            for step in (-1, 1):
                if not ip.lo[i] <= x[i] + step <= ip.hi[i]:
                    continue
                nu = u + step * ip.a[i]
                if ip.band_lo <= nu <= ip.band_hi:
                    d = abs(diff + step * ip.m[i])
                    if d < best[0] - 1e-12:
                        best = (d, ((i, step),))
        if best[1] is None and n <= 400:
            for i in range(n):
                if x[i] <= ip.lo[i]:
                    continue
                for j in range(n):
                    if j == i or x[j] >= ip.hi[j]:
                        continue
                    nu = u - ip.a[i] + ip.a[j]
                    if ip.band_lo <= nu <= ip.band_hi:
                        d = abs(diff - ip.m[i] + ip.m[j])
                        if d < best[0] - 1e-12:
                            best = (d, ((i, -1), (j, 1)))
        if best[1] is None:
            break
        for i, step in best[1]:
            x[i] += step
            u += step * ip.a[i]
            v += step * ip.m[i]
    return x


class _Search:
    def __init__(self, ip: IntegerProgram, gap: float, deadline: float, node_limit: Optional[int]):
        self.ip = ip
        self.gap = gap
        self.deadline = deadline
        self.node_limit = node_limit
        n = len(ip.a)
        # branch on the variables that move the size most
        self.order = sorted(range(n), key=lambda i: (-ip.m[i] * (ip.hi[i] - ip.lo[i]), i))
        self.suffix = [sorted(self.order[d:], key=lambda i: (-ip.m[i] / ip.a[i], i)) for d in range(n + 1)]
        self.best_val = math.inf
        self.best_x: Optional[list[int]] = None
        self.nodes = 0
        self.stopped: Optional[Status] = None
        self.guide: Optional[list[int]] = None

    def offer(self, x: list[int]):
        if x is not None and self.ip.feasible(x):
            val = self.ip.objective(x)
            if val < self.best_val:
                self.best_val = val
                self.best_x = list(x)

    def run(self):
        n = len(self.ip.a)
        x = [0] * n
        limit = sys.getrecursionlimit()
        if limit < n + 200:
            sys.setrecursionlimit(n + 200)
        try:
            self._dfs(0, 0.0, 0.0, x)
        finally:
            sys.setrecursionlimit(limit)

    def _dfs(self, d: int, a0: float, m0: float, x: list[int]):
        if self.stopped:
            return
        self.nodes += 1
        if self.nodes & 255 == 0 and time.monotonic() > self.deadline:
            self.stopped = Status.TIMEOUT
            return
        if self.node_limit is not None and self.nodes > self.node_limit:
            self.stopped = Status.FEASIBLE
            return
        ip = self.ip
        bound = lp_bound(ip, self.suffix[d], a0, m0)
        if bound is None or bound >= self.best_val or bound > self.best_val - self.gap:
            return
        if d == len(x):
            val = abs(m0 - ip.target)
            if val < self.best_val:
                self.best_val = val
                self.best_x = list(x)
            return
        i = self.order[d]
        lo, hi = ip.lo[i], ip.hi[i]
        g = self.guide[i] if self.guide is not None else lo
        for v in _fan(min(max(g, lo), hi), lo, hi):
            x[i] = v
            self._dfs(d + 1, a0 + ip.a[i] * v, m0 + ip.m[i] * v, x)
            if self.stopped:
                return


def _fan(g: int, lo: int, hi: int):
    yield g
    for k in range(1, max(g - lo, hi - g) + 1):
        if g + k <= hi:
            yield g + k
        if g - k >= lo:
            yield g - k


def solve_program(ip: IntegerProgram, budget_s: float = 120.0, gap: float = 0.5,
                  node_limit: Optional[int] = None, warm_start: bool = True):
    """Return ``(x, status, objective, nodes)``; raises on infeasibility or a barren timeout."""
    start = time.monotonic()
    search = _Search(ip, gap, start + budget_s, node_limit)
    root = lp_bound(ip, search.suffix[0])
    if root is None or any(lo > hi for lo, hi in zip(ip.lo, ip.hi)):
        raise InfeasibleProblem("coherence band unreachable within variable bounds")
    if warm_start:
        search.offer(greedy_round(ip, search.suffix[0]))
        search.guide = search.best_x
    if search.best_val - root > gap or search.best_x is None:
        search.run()
    if search.best_x is None:
        if search.stopped == Status.TIMEOUT:
            raise SolverTimeout("no feasible point found within budget")
        if search.stopped is None:
            raise InfeasibleProblem("no integer point satisfies the coherence band")
        raise SolverTimeout("node limit reached without a feasible point")
    status = search.stopped or Status.OPTIMAL
    return search.best_x, status, search.best_val, search.nodes


def solve(problem: GenerationProblem, budget_s: Optional[float] = None, gap: float = 0.5,
          node_limit: Optional[int] = None, rel_gap: float = 0.0) -> GenerationSolution:
    """Solve the deletion program.

    The search stops once the incumbent is within ``max(gap, rel_gap * target_size)``
    triples of the relaxation bound.
    """
    t0 = time.monotonic()
    gap = max(gap, rel_gap * problem.target_size)
    ip = IntegerProgram.from_problem(problem)
    budget = problem.budget_s if budget_s is None else budget_s
    if not problem.keys:
        x: list[int] = []
        if not problem.ch_low <= problem.ch_constant <= problem.ch_high:
            raise InfeasibleProblem("coherence is fixed outside the target band")
        return GenerationSolution(x, problem.ch_constant, problem.predicted_size(x), Status.OPTIMAL,
                                  float(problem.objective(x)), 0, time.monotonic() - t0)
    x, status, _, nodes = solve_program(ip, budget, gap, node_limit)
    return GenerationSolution(
        x=x,
        predicted_ch=problem.predicted_ch(x),
        predicted_size=problem.predicted_size(x),
        status=status,
        objective=float(problem.objective(x)),
        nodes=nodes,
        elapsed_s=time.monotonic() - t0,
    )


def brute_force(ip: IntegerProgram, chunk: int = 1 << 20) -> tuple[float, Optional[tuple[int, ...]]]:
    """Exhaustive minimum over every integer point of the box (numpy, meet in the middle)."""
    n = len(ip.a)
    if n == 0:
        return (abs(ip.target) if ip.band_lo <= 0 <= ip.band_hi else math.inf), ()
    half = n // 2

    def table(idx):
        if not idx:
            return np.zeros((1, 0), dtype=np.int64)
        grids = [np.arange(ip.lo[i], ip.hi[i] + 1) for i in idx]
        mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(idx))
        return mesh

    left_idx, right_idx = list(range(half)), list(range(half, n))
    left, right = table(left_idx), table(right_idx)
    a, m = np.array(ip.a), np.array(ip.m)
    la = left @ a[left_idx] if left_idx else np.zeros(len(left))
    lm = left @ m[left_idx] if left_idx else np.zeros(len(left))
    ra = right @ a[right_idx]
    rm = right @ m[right_idx]
    best = math.inf
    best_x = None
    rows = max(1, chunk // max(1, len(right)))
    for s in range(0, len(left), rows):
        ua = la[s:s + rows, None] + ra[None, :]
        um = np.abs(lm[s:s + rows, None] + rm[None, :] - ip.target)
        um[(ua < ip.band_lo) | (ua > ip.band_hi)] = np.inf
        k = int(np.argmin(um))
        val = float(um.flat[k])
        if val < best:
            best = val
            r, c = divmod(k, len(right))
            best_x = tuple(int(v) for v in itertools.chain(left[s + r], right[c]))
    return best, best_x

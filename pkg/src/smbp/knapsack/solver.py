"""Bound tightening and the equidistant / adaptive pricing drivers."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..instance import FEAS_TOL
from .bnc import _linear_only, solve_pwl_bnc
from .cuts import CutPool
from .problem import OPTIMAL, TIME_LIMIT, KnapsackProblem, KnapsackResult
from .pwl import PwlModel, adaptive_breakpoints, breakpoint_count, build_breakpoints

WARMUP_THRESHOLD = 0.1


def closed_form_lower(problem: KnapsackProblem) -> float:
    """Every set with a @ x <= this value fits: max(0, c - sigma * sqrt(sum b))."""
    return max(0.0, problem.capacity - problem.sigma * math.sqrt(float(problem.b.sum())))


def exact_lower(problem: KnapsackProblem, max_items: int = 25) -> float:
    """Smallest load a @ x over capacity-infeasible 0/1 points (c if none).

    Loads strictly below it are always feasible.  Depth-first search with
    pruning on the running load; exponential, meant for small m.
    """
    m = problem.m
    if m > max_items:
        raise ValueError(f"exact lower bound refused for m={m} > {max_items}")
    order = np.argsort(problem.a)
    a, b = problem.a[order], problem.b[order]
    best = [problem.capacity]

    def dfs(k, A, B):
        if A >= best[0]:
            return
        if A + problem.sigma * math.sqrt(B) > problem.capacity + FEAS_TOL:
            best[0] = A
            return
        for j in range(k, m):
            if A + a[j] >= best[0]:
                break
            dfs(j + 1, A + a[j], B + b[j])

    dfs(0, 0.0, 0.0)
    return min(best[0], problem.capacity)


def exact_upper(problem: KnapsackProblem, time_limit: Optional[float] = None,
                cut_pool: Optional[CutPool] = None, gap_tol: float = 1e-4) -> float:
    """Upper bound on the load a @ x of feasible points: the dual bound of the
    PWL branch-and-cut with profits a on the safe interval [0, c].

    Exact when the search finishes; otherwise the (still valid) dual bound
    at the time limit is used.
    """
    if problem.m == 0:
        return 0.0
    p = problem.with_profits(problem.a)
    if _linear_only(p):
        res = solve_pwl_bnc(p, None, time_limit, gap_tol, cut_pool=cut_pool)
    else:
        pwl = build_breakpoints(p, 0.0, problem.capacity, breakpoint_count(p))
        res = solve_pwl_bnc(p, pwl, time_limit, gap_tol, cut_pool=cut_pool)
    return min(problem.capacity, res.dual_bound)


def tighten_bounds(problem: KnapsackProblem, exact_lower_bound: bool = False,
                   time_limit: Optional[float] = None,
                   cut_pool: Optional[CutPool] = None) -> tuple[float, float]:
    """Return (w_lo, w_hi) with 0 <= w_lo <= w_hi <= c."""
    w_hi = exact_upper(problem, time_limit, cut_pool)
    if _linear_only(problem):
        return w_hi, w_hi
    w_lo = exact_lower(problem) if exact_lower_bound else closed_form_lower(problem)
    return min(w_lo, w_hi), w_hi


@dataclass
class PricingContext:
    """Profit-independent data of one merged pricing problem.

    Bounds, breakpoint count, the adaptive centre and the cut pool are all
    valid for every profit vector, so they are computed once and reused by
    every pricing call on the same merged items.
    """
    base: KnapsackProblem
    breakpoints: str = "equidistant"
    exact_lower_bound: bool = False
    bound_time_limit: Optional[float] = 0.5
    w_lo: float = 0.0
    w_hi: float = 0.0
    h: int = 2
    pool: CutPool = field(default_factory=CutPool)
    w_c: Optional[float] = None
    warmed_up: bool = False
    setup_time: float = 0.0

    def __post_init__(self):
        if self.breakpoints not in ("equidistant", "adaptive"):
            raise ValueError(f"unknown breakpoint rule {self.breakpoints!r}")
        t0 = time.perf_counter()
        self.w_lo, self.w_hi = tighten_bounds(self.base, self.exact_lower_bound,
                                              self.bound_time_limit, self.pool)
        self.h = breakpoint_count(self.base) if self.base.m else 2
        self.setup_time = time.perf_counter() - t0

    @property
    def linear(self) -> bool:
        return _linear_only(self.base)

    def model(self) -> Optional[PwlModel]:
        if self.linear:
            return None
        if self.breakpoints == "adaptive" and self.w_c is not None:
            return adaptive_breakpoints(self.base, self.w_lo, self.w_hi, self.h, self.w_c)
        return build_breakpoints(self.base, self.w_lo, self.w_hi, self.h)

    def solve(self, profits, time_limit: Optional[float] = None,
              initial=None) -> KnapsackResult:
        problem = self.base.with_profits(profits)
        if self.breakpoints == "adaptive" and not self.warmed_up and not self.linear:
            res = self._warmup(problem, time_limit, initial)
            if res is not None:
                return res
        return solve_pwl_bnc(problem, self.model(), time_limit, cut_pool=self.pool,
                             initial=initial)

    def _warmup(self, problem, time_limit, initial) -> Optional[KnapsackResult]:
        """Equidistant run stopped once successive separated loads differ by at
        most 10% of [w_lo, w_hi]; that load becomes the centre."""
        self.warmed_up = True
        width = self.w_hi - self.w_lo
        if width <= 0:
            return None
        last = []

        def on_cut(w):
            if last and abs(w - last[-1]) / width <= WARMUP_THRESHOLD:
                self.w_c = w
                return True
            last.append(w)
            return False

        t0 = time.perf_counter()
        res = solve_pwl_bnc(problem, build_breakpoints(problem, self.w_lo, self.w_hi, self.h),
                            time_limit, cut_pool=self.pool, initial=initial, on_cut=on_cut)
        if self.w_c is None:
            return res      # no convergence: the warm-up itself is the answer
        remaining = None if time_limit is None else max(0.0, time_limit - (time.perf_counter() - t0))
        final = solve_pwl_bnc(problem, self.model(), remaining, cut_pool=self.pool,
                              initial=res.x)
        final.cuts += res.cuts
        final.nodes += res.nodes
        final.lp_solves += res.lp_solves
        final.cut_points = res.cut_points + final.cut_points
        final.time += res.time
        return final


def solve_knapsack(problem: KnapsackProblem, method: str = "pwl",
                   time_limit: Optional[float] = None) -> KnapsackResult:
    """One-shot entry point used by the CLI: pwl, pwl-adaptive, enum or greedy."""
    from .heuristics import fixing_greedy
    from .problem import enumerate_knapsack
    t0 = time.perf_counter()
    if method == "enum":
        return enumerate_knapsack(problem)
    if method == "greedy":
        x, v = fixing_greedy(problem)
        return KnapsackResult(TIME_LIMIT, x, v, math.inf, time=time.perf_counter() - t0)
    if method not in ("pwl", "pwl-adaptive"):
        raise ValueError(f"unknown method {method!r}")
    ctx = PricingContext(problem, "adaptive" if method == "pwl-adaptive" else "equidistant")
    res = ctx.solve(problem.profits, time_limit)
    res.time = time.perf_counter() - t0
    return res

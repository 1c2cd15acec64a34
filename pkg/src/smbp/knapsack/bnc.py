"""Branch-and-cut over the PWL relaxation of the submodular knapsack.

The node LP holds the binary item variables x, convex-combination weights
lambda over the breakpoints and one piece selector z per segment:

    max   pi @ x
    s.t.  a @ x = sum_k lambda_k w_k
          sigma^2 * b @ x <= sum_k lambda_k q(w_k)
          sum lambda = 1, sum z = 1, lambda_k <= z_{k-1} + z_k
          x_i + x_j <= 1 for conflicting pairs
          theta @ x <= c for every separated cut

A binary x that violates the true capacity constraint is cut off with the
linearization at that point and the node is re-solved.
"""
from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..instance import FEAS_TOL
from ..lp import INFEASIBLE, ITER_LIMIT, OPTIMAL as LP_OPTIMAL, LpProblem, solve_lp
from .cuts import CutPool
from .heuristics import fixing_greedy
from .problem import OPTIMAL, TIME_LIMIT, KnapsackProblem, KnapsackResult
from .pwl import PwlModel

INT_TOL = 1e-6


def _linear_only(problem: KnapsackProblem) -> bool:
    return problem.sigma == 0.0 or not np.any(problem.b > 0)


@dataclass
class _Model:
    lp: LpProblem
    nx: int
    lam: slice
    z: slice
    n_base_rows: int
    cuts_in_lp: int = 0


def _build_lp(problem: KnapsackProblem, pwl: Optional[PwlModel]) -> _Model:
    m = problem.m
    lp = LpProblem("max")
    for i in range(m):
        lp.add_column(float(problem.profits[i]), None, 0.0, 1.0)
    if pwl is None:
        lp.add_row("<", problem.capacity, {i: problem.a[i] for i in range(m)})
        lam = z = slice(m, m)
    else:
        w = pwl.breakpoints
        qv = pwl.values
        K = len(w)
        l0 = lp.ncols
        for _ in range(K):
            lp.add_column(0.0, None, 0.0, 1.0)
        z0 = lp.ncols
        for _ in range(K - 1):
            lp.add_column(0.0, None, 0.0, 1.0)
        lam, z = slice(l0, l0 + K), slice(z0, z0 + K - 1)
        s2 = problem.sigma ** 2
        row = {i: problem.a[i] for i in range(m)}
        row.update({l0 + k: -w[k] for k in range(K)})
        lp.add_row("=", 0.0, row)
        row = {i: s2 * problem.b[i] for i in range(m)}
        row.update({l0 + k: -qv[k] for k in range(K)})
        lp.add_row("<", 0.0, row)
        lp.add_row("=", 1.0, {l0 + k: 1.0 for k in range(K)})
        if K > 1:
            lp.add_row("=", 1.0, {z0 + k: 1.0 for k in range(K - 1)})
            for k in range(K):
                row = {l0 + k: 1.0}
                if k > 0:
                    row[z0 + k - 1] = -1.0
                if k < K - 1:
                    row[z0 + k] = -1.0
                lp.add_row("<", 0.0, row)
    for i, j in sorted(problem.conflicts):
        lp.add_row("<", 1.0, {i: 1.0, j: 1.0})
    return _Model(lp, m, lam, z, lp.nrows)


def _sync_cuts(model: _Model, pool: CutPool) -> None:
    while model.cuts_in_lp < len(pool):
        k = model.cuts_in_lp
        theta = pool.thetas[k]
        model.lp.add_row("<", pool.rhs[k], {i: theta[i] for i in range(model.nx)})
        model.cuts_in_lp += 1


@dataclass(order=True)
class _Node:
    key: tuple
    lb: np.ndarray = field(compare=False)
    ub: np.ndarray = field(compare=False)
    basis: object = field(compare=False, default=None)
    bound: float = field(compare=False, default=math.inf)


def _fractional(v: np.ndarray) -> np.ndarray:
    return np.minimum(v - np.floor(v), np.ceil(v) - v)


def solve_pwl_bnc(problem: KnapsackProblem, pwl: Optional[PwlModel],
                  time_limit: Optional[float] = None, gap_tol: float = 1e-7,
                  cut_pool: Optional[CutPool] = None,
                  initial: Optional[np.ndarray] = None,
                  on_cut: Optional[Callable[[float], bool]] = None) -> KnapsackResult:
    """Exact PWL branch-and-cut.

    ``pwl`` may be None when the capacity constraint is linear (sigma = 0).
    ``cut_pool`` cuts are loaded into the root LP and new cuts are appended to
    it.  ``on_cut`` is called with the load a @ x of each separated point; a
    true return value aborts the search (status TimeLimit, honest bound).
    """
    t0 = time.perf_counter()
    deadline = math.inf if time_limit is None else t0 + time_limit
    m = problem.m
    pool = cut_pool if cut_pool is not None else CutPool()
    if _linear_only(problem):
        pwl = None
    elif pwl is None:
        raise ValueError("a breakpoint model is required when sigma > 0")

    # incumbent
    inc_x = np.zeros(m, dtype=np.uint8)
    inc_val = 0.0
    if m > 0:
        gx, gv = fixing_greedy(problem)
        if gv > inc_val and problem.is_feasible(gx):
            inc_x, inc_val = gx.astype(np.uint8), gv
    if initial is not None:
        init = np.asarray(initial, dtype=np.uint8)
        if problem.is_feasible(init) and problem.value(init) > inc_val:
            inc_x, inc_val = init.copy(), problem.value(init)
    if m == 0:
        return KnapsackResult(OPTIMAL, inc_x, 0.0, 0.0, time=time.perf_counter() - t0)

    model = _build_lp(problem, pwl)
    lp = model.lp
    _sync_cuts(model, pool)
    lb0 = lp.lb.copy()
    ub0 = lp.ub.copy()
    single = problem.a + problem.sigma * np.sqrt(problem.b)
    ub0[:m][(problem.profits <= 0.0) | (single > problem.capacity + FEAS_TOL)] = 0.0

    counter = itertools.count()
    heap: list[_Node] = [_Node((-math.inf, 0, next(counter)), lb0, ub0, None, math.inf)]
    fathomed_bound = -math.inf   # largest bound among nodes pruned against the incumbent
    unresolved_bound = -math.inf
    nodes = lp_solves = n_cuts = 0
    cut_points: list[float] = []
    stopped = False

    def tol():
        return gap_tol * max(1.0, abs(inc_val))

    while heap:
        if time.perf_counter() > deadline:
            stopped = True
            break
        node = heapq.heappop(heap)
        if node.bound <= inc_val + tol():
            fathomed_bound = max(fathomed_bound, node.bound)
            continue
        nodes += 1
        lp.lb[:] = node.lb
        lp.ub[:] = node.ub
        basis = node.basis
        depth = node.key[1]
        while True:
            sol = solve_lp(lp, basis)
            lp_solves += 1
            if sol.status == ITER_LIMIT:
                sol = solve_lp(lp, None, bland=True, max_iter=400 * (lp.nrows + lp.ncols))
                lp_solves += 1
            if sol.status != LP_OPTIMAL:
                break
            U = sol.objective
            if U <= inc_val + tol():
                break
            x = sol.x[:m]
            fx = _fractional(x)
            zf = _fractional(sol.x[model.z]) if pwl is not None else np.zeros(0)
            if fx.max() <= INT_TOL:
                xhat = np.round(x).astype(np.uint8)
                if problem.is_feasible(xhat):
                    v = problem.value(xhat)
                    if v > inc_val:
                        inc_x, inc_val = xhat, v
                    break
                if zf.size and zf.max() > INT_TOL:
                    break   # resolve the piece selection first
                w = float(problem.a @ xhat)
                added = pool.separate(problem, xhat)
                if not added:
                    # cut already in the LP and still violated within LP
                    # tolerance: exclude the point combinatorially instead
                    S = np.flatnonzero(xhat)
                    pool.thetas.append(np.zeros(m))
                    pool.thetas[-1][S] = 1.0
                    pool.rhs.append(float(len(S) - 1))
                    pool.origins.append(xhat)
                n_cuts += 1
                cut_points.append(w)
                _sync_cuts(model, pool)
                basis = sol.basis
                if on_cut is not None and on_cut(w):
                    stopped = True
                    unresolved_bound = max(unresolved_bound, U)
                    sol = None
                    break
                continue
            break
        if stopped:
            break
        if sol is None:
            continue
        if sol.status == INFEASIBLE:
            continue
        if sol.status != LP_OPTIMAL:
            unresolved_bound = max(unresolved_bound, node.bound)
            continue
        U = sol.objective
        if U <= inc_val + tol():
            fathomed_bound = max(fathomed_bound, U)
            continue
        x = sol.x[:m]
        fx = _fractional(x)
        if fx.max() <= INT_TOL:
            if zf.size == 0 or zf.max() <= INT_TOL:
                continue   # integral and feasible: handled above
            var = model.z.start + int(np.argmax(zf))
        elif zf.size and zf.max() > INT_TOL:
            var = model.z.start + int(np.argmax(zf))
        else:
            score = np.where(fx > INT_TOL, fx + 1e-9 * np.abs(problem.profits), -1.0)
            var = int(np.argmax(score))
        for lo, hi in ((0.0, 0.0), (1.0, 1.0)):
            clb, cub = node.lb.copy(), node.ub.copy()
            if lo < clb[var] or hi > cub[var]:
                continue
            clb[var], cub[var] = lo, hi
            heapq.heappush(heap, _Node((-U, -(depth + 1), next(counter)), clb, cub,
                                       sol.basis, U))

    open_bound = max((nd.bound for nd in heap), default=-math.inf)
    dual = max(inc_val, open_bound, fathomed_bound, unresolved_bound)
    status = OPTIMAL if (not stopped and dual - inc_val <= tol()
                         and unresolved_bound <= inc_val + tol()) else TIME_LIMIT
    return KnapsackResult(status, inc_x, float(inc_val), float(dual), nodes=nodes,
                          cuts=n_cuts, lp_solves=lp_solves,
                          time=time.perf_counter() - t0, cut_points=cut_points)

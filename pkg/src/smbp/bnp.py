"""Branch-and-price for submodular bin packing.

Best-first tree over Ryan-Foster branching states.  At every node the
restricted master LP is grown by column generation; pricing is a submodular
knapsack over the merged items of the node, solved by a greedy heuristic
and/or the PWL branch-and-cut.
"""
from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .instance import (BranchState, Column, InfeasibleBranch, SmbpInstance,
                       is_feasible_column, merge_preprocess, together_groups)
from .knapsack import OPTIMAL, KnapsackProblem, PricingContext, fixing_greedy
from .master import EARLY_STOP, MasterLP, ceil_bound, farley_bound, repair_cover

PROFIT_TOL = 1e-6
INT_TOL = 1e-6


@dataclass
class BnpConfig:
    time_limit: float = 60.0
    pricing: str = "hybrid"              # hybrid | exact
    breakpoints: str = "equidistant"     # equidistant | adaptive
    colsel: bool = True
    pricing_time_limit: Optional[float] = None   # default: n * 0.015 s
    bound_time_limit: float = 0.5
    root_time_budget: Optional[float] = None
    gap_tol: float = 1e-6
    max_nodes: Optional[int] = None
    early_stop: bool = EARLY_STOP
    seed: int = 0

    def __post_init__(self):
        if self.pricing not in ("hybrid", "exact"):
            raise ValueError(f"unknown pricing mode {self.pricing!r}")
        if self.breakpoints not in ("equidistant", "adaptive"):
            raise ValueError(f"unknown breakpoint rule {self.breakpoints!r}")


@dataclass
class SolveReport:
    status: str = "Unknown"          # Optimal | TimeLimit | NodeLimit
    objective: int = 0
    dual_bound: int = 0
    dual_bound_raw: float = 0.0
    gap: float = 0.0
    warm_start: int = 0
    root_bound: float = 0.0
    nodes: int = 0
    columns: int = 0
    exact_columns: int = 0
    heuristic_columns: int = 0
    colsel_columns: int = 0
    exact_calls: int = 0
    heuristic_calls: int = 0
    pricing_timeouts: int = 0
    pricing_gaps: list = field(default_factory=list)
    pricing_time: float = 0.0
    master_time: float = 0.0
    heuristic_time: float = 0.0
    time: float = 0.0
    unresolved_nodes: int = 0
    farley_trace: list = field(default_factory=list)   # root (v_rmlp, v_F) per exact call

    @property
    def exact_pct(self) -> float:
        return 100.0 * self.exact_columns / self.columns if self.columns else 0.0

    @property
    def pricing_gap(self) -> float:
        return float(np.mean(self.pricing_gaps)) if self.pricing_gaps else 0.0

    @property
    def pricing_time_pct(self) -> float:
        return 100.0 * self.pricing_time / self.time if self.time > 0 else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("pricing_gaps")
        d.pop("farley_trace")
        d.update(exact_pct=self.exact_pct, pricing_gap=self.pricing_gap,
                 pricing_time_pct=self.pricing_time_pct)
        return d


# ---------------------------------------------------------------- heuristics

def greedy_min_utilization(instance: SmbpInstance) -> list[Column]:
    """Pack items one at a time choosing the (item, open bin) pair of least
    incremental usage; a new bin is opened only when no open bin takes any
    remaining item."""
    assign = kernels.greedy_min_util(instance.a, instance.b, instance.sigma, instance.capacity)
    bins: dict[int, list[int]] = {}
    for i, k in enumerate(assign):
        bins.setdefault(int(k), []).append(i)
    return [Column.make(instance, bins[k]) for k in sorted(bins)]


def column_selection_heuristic(new_column: Column, pool, instance: SmbpInstance):
    """Start from ``new_column`` and keep adding the pool column covering the
    most uncovered items.  Returns a partition (list of item tuples) or None
    when some item stays uncovered."""
    full = (1 << instance.n) - 1
    masks = [c.mask if isinstance(c, Column) else int(c) for c in pool]
    chosen = [new_column.mask]
    covered = new_column.mask
    while covered != full:
        best, gain = None, 0
        rest = full & ~covered
        for mk in masks:
            g = (mk & rest).bit_count()
            if g > gain:
                best, gain = mk, g
        if best is None:
            return None
        chosen.append(best)
        covered |= best
    bins = [[i for i in range(instance.n) if (mk >> i) & 1] for mk in chosen]
    return repair_cover(bins)


def co_occurrence(support) -> dict:
    """rho(i, j) = sum of lambda over support columns holding both i and j."""
    rho: dict[tuple[int, int], float] = {}
    for col, lam in support:
        items = col.items if isinstance(col, Column) else tuple(sorted(col))
        for x in range(len(items)):
            for y in range(x + 1, len(items)):
                key = (items[x], items[y])
                rho[key] = rho.get(key, 0.0) + lam
    return rho


def select_branching_pair(support, tol: float = INT_TOL):
    """The pair maximizing min(rho, 1 - rho), ties to the lexicographically
    smallest; None if every rho is integral."""
    rho = co_occurrence(support)
    best, score = None, tol
    for key in sorted(rho):
        s = min(rho[key], 1.0 - rho[key])
        if s > score:
            best, score = key, s
    return best


@dataclass
class HybridOutcome:
    column: Optional[tuple]      # merged-item indices
    v_ld: float
    used_exact: bool
    price_bound: Optional[float] = None
    value: float = 0.0
    result: object = None
    farley: Optional[float] = None


def hybrid_pricing(problem: KnapsackProblem, v_rmlp: float, v_ld: float,
                   exact, use_heuristic: bool = True) -> HybridOutcome:
    """Heuristic first; the exact solver ``exact(problem)`` (returning a
    KnapsackResult) is skipped when it could not raise ``v_ld`` and the
    heuristic column prices out."""
    if use_heuristic and problem.m:
        x, v_heur = fixing_greedy(problem)
        # a margin on the reduced cost keeps LP round-off from re-proposing
        # columns that are already in the pool
        if 1.0 - v_heur < -PROFIT_TOL and v_rmlp / v_heur <= v_ld:
            return HybridOutcome(tuple(int(i) for i in np.flatnonzero(x)), v_ld, False,
                                 None, v_heur)
    res = exact(problem)
    v_price = res.dual_bound
    v_f = farley_bound(v_rmlp, max(v_price, 1.0))
    col = res.items if res.value > 1.0 + PROFIT_TOL else None
    return HybridOutcome(col, max(v_ld, v_f), True, v_price, res.value, res, v_f)


# ---------------------------------------------------------------- tree search

@dataclass(order=True)
class BnpNode:
    key: tuple
    branch: BranchState = field(compare=False)
    v_ld: float = field(compare=False)
    depth: int = field(compare=False, default=0)
    parent: Optional[int] = field(compare=False, default=None)
    basis: object = field(compare=False, default=None)


class _Solver:
    def __init__(self, instance: SmbpInstance, config: BnpConfig, prune: bool = True):
        self.inst = instance.validate()
        self.prune = prune
        self.cfg = config
        self.t0 = time.perf_counter()
        self.deadline = self.t0 + config.time_limit
        self.report = SolveReport()
        n = instance.n
        self.price_limit = (config.pricing_time_limit if config.pricing_time_limit is not None
                            else n * 0.015)
        self.root_lb = float(np.sum(instance.a)) / instance.capacity

        t = time.perf_counter()
        greedy = greedy_min_utilization(instance)
        self.report.heuristic_time += time.perf_counter() - t
        self.best_bins = [c.items for c in greedy]
        self.report.warm_start = len(greedy)
        self.master = MasterLP(instance, greedy)
        self.counter = itertools.count()

    # incumbent -------------------------------------------------------------
    @property
    def incumbent(self) -> int:
        return len(self.best_bins)

    def offer(self, bins) -> None:
        bins = [tuple(b) for b in bins]
        if len(bins) < self.incumbent and all(is_feasible_column(self.inst, b) for b in bins):
            if sorted(i for b in bins for i in b) == list(range(self.inst.n)):
                self.best_bins = bins

    def remaining(self) -> float:
        return self.deadline - time.perf_counter()

    def add_column(self, items, source: str) -> bool:
        col = Column.make(self.inst, items)
        if self.master.add(col) is None:
            return False
        r = self.report
        r.columns += 1
        if source == "exact":
            r.exact_columns += 1
        elif source == "heuristic":
            r.heuristic_columns += 1
        if self.cfg.colsel:
            t = time.perf_counter()
            sol = column_selection_heuristic(col, self.master.columns, self.inst)
            if sol is not None:
                self.offer(sol)
            r.heuristic_time += time.perf_counter() - t
        return True

    # pricing -----------------------------------------------------------------
    def _exact(self, ctx: PricingContext):
        def run(problem: KnapsackProblem):
            r = self.report
            t = time.perf_counter()
            limit = self.price_limit
            while True:
                lim = min(limit, max(self.remaining(), 0.0))
                res = ctx.solve(problem.profits, lim)
                if (res.status == OPTIMAL or res.value > 1.0 + PROFIT_TOL
                        or limit >= self.remaining()):
                    break
                limit *= 2.0
            if res.status != OPTIMAL:
                r.pricing_timeouts += 1
            r.exact_calls += 1
            r.pricing_gaps.append(100.0 * max(res.dual_bound - res.value, 0.0)
                                  / max(res.value, 1e-6))
            r.pricing_time += time.perf_counter() - t
            return res
        return run

    def process(self, node: BnpNode):
        """Column generation at ``node``.  Returns (v_ld, lambda support or
        None when the node is pruned, basis, converged)."""
        inst, cfg, r = self.inst, self.cfg, self.report
        try:
            merged = merge_preprocess(inst, node.branch)
        except InfeasibleBranch:
            return None
        for g in merged.groups:
            if not is_feasible_column(inst, g):
                return None
            if len(g) > 1:
                self.add_column(g, "init")
        self.master.set_branch(node.branch)
        base = KnapsackProblem.from_merged(merged)
        ctx: Optional[PricingContext] = None
        v_ld = node.v_ld
        basis = node.basis
        is_root = node.depth == 0
        converged = False
        force_exact = False
        while True:
            t = time.perf_counter()
            sol = self.master.solve(basis)
            basis = sol.basis
            r.master_time += time.perf_counter() - t
            v = sol.objective
            self._check_integral(sol)
            if self.prune and ceil_bound(v_ld) >= self.incumbent:
                return v_ld, [], basis, False
            if self.remaining() <= 0:
                break
            if is_root and cfg.root_time_budget is not None and \
                    time.perf_counter() - self.t0 > cfg.root_time_budget:
                break
            duals = sol.duals
            profits = np.array([duals[list(g)].sum() for g in merged.groups])
            problem = base.with_profits(profits)
            if ctx is None:
                t = time.perf_counter()
                ctx = PricingContext(base, cfg.breakpoints,
                                     bound_time_limit=cfg.bound_time_limit)
                r.pricing_time += time.perf_counter() - t

            out = hybrid_pricing(problem, v, v_ld, self._exact(ctx),
                                 use_heuristic=(cfg.pricing == "hybrid" and not force_exact))
            force_exact = False
            if not out.used_exact:
                r.heuristic_calls += 1
            elif is_root:
                r.farley_trace.append((v, out.farley))
            v_ld = max(v_ld, out.v_ld)
            if out.column is not None:
                added = self.add_column(merged.expand(out.column),
                                        "exact" if out.used_exact else "heuristic")
                if not added:
                    if out.used_exact:
                        break    # LP round-off; nothing new to learn here
                    force_exact = True
            if out.used_exact:
                if out.price_bound <= 1.0 + PROFIT_TOL and out.result.status == OPTIMAL:
                    v_ld = max(v_ld, v)
                    converged = True
                    break
                if out.column is None:
                    break        # pricing could not finish within the time left
            if cfg.early_stop and ceil_bound(v_ld) == ceil_bound(v):
                break
        if converged and np.any(self.master.artificial(sol) > INT_TOL):
            return None          # no cover without artificial columns
        return v_ld, self.master.support(sol), basis, converged

    def _check_integral(self, sol) -> None:
        if np.any(self.master.artificial(sol) > INT_TOL):
            return
        lam = self.master.lambdas(sol)
        pos = lam > INT_TOL
        if np.all(np.abs(lam[pos] - 1.0) <= INT_TOL):
            bins = [self.master.columns[k].items for k in np.flatnonzero(pos)]
            self.offer(repair_cover(bins))

    def run(self):
        inst, cfg, r = self.inst, self.cfg, self.report
        root = BnpNode((self.root_lb, 0, next(self.counter)), BranchState(), self.root_lb)
        heap = [root]
        unresolved: list[float] = []
        status = "Optimal"
        while heap:
            best_open = min(min(nd.v_ld for nd in heap), min(unresolved, default=math.inf))
            if ceil_bound(best_open) >= self.incumbent:
                heap.clear()
                break
            if self.remaining() <= 0:
                status = "TimeLimit"
                break
            if cfg.max_nodes is not None and r.nodes >= cfg.max_nodes:
                status = "NodeLimit"
                break
            node = heapq.heappop(heap)
            if ceil_bound(node.v_ld) >= self.incumbent:
                continue
            r.nodes += 1
            out = self.process(node)
            if out is None:
                continue
            v_ld, support, basis, converged = out
            v_ld = max(v_ld, node.v_ld)
            if node.depth == 0:
                r.root_bound = v_ld
            if ceil_bound(v_ld) >= self.incumbent:
                continue
            if not support:
                continue
            pair = select_branching_pair(support)
            if pair is None:
                if all(abs(l - 1.0) <= INT_TOL for _, l in support):
                    continue         # integral: already offered as incumbent
                rho = co_occurrence(support)
                self.offer(_components(inst.n, rho))
                if ceil_bound(v_ld) < self.incumbent:
                    unresolved.append(v_ld)
                    r.unresolved_nodes += 1
                continue
            if not converged and self.remaining() <= 0:
                heap.append(BnpNode((v_ld, -node.depth, next(self.counter)), node.branch,
                                    v_ld, node.depth, node.parent, basis))
                status = "TimeLimit"
                break
            i, j = pair
            for br in (node.branch.with_together(i, j), node.branch.with_apart(i, j)):
                heapq.heappush(heap, BnpNode((v_ld, -(node.depth + 1), next(self.counter)),
                                             br, v_ld, node.depth + 1, r.nodes, basis))
        # the root counts as processed even when its initial bound fathoms it
        r.nodes = max(r.nodes, 1)
        open_bounds = [nd.v_ld for nd in heap] + unresolved
        raw = min(open_bounds) if open_bounds else float(self.incumbent)
        raw = min(raw, float(self.incumbent))
        r.dual_bound_raw = raw
        r.dual_bound = min(ceil_bound(raw), self.incumbent)
        r.objective = self.incumbent
        r.gap = (r.objective - r.dual_bound) / r.objective
        if r.gap > cfg.gap_tol and status == "Optimal":
            status = "TimeLimit" if self.remaining() <= 0 else "Unresolved"
        r.status = status if r.gap > cfg.gap_tol else "Optimal"
        r.time = time.perf_counter() - self.t0
        return r, [tuple(b) for b in self.best_bins]


def _components(n: int, rho: dict) -> list[tuple[int, ...]]:
    return together_groups(n, [p for p, v in rho.items() if v >= 1.0 - INT_TOL])


def solve_bnp(instance: SmbpInstance, config: Optional[BnpConfig] = None):
    """Solve ``instance``; returns (SolveReport, bins)."""
    return _Solver(instance, config or BnpConfig()).run()


def solve_root(instance: SmbpInstance, config: Optional[BnpConfig] = None):
    """Column generation at the root only, without incumbent pruning.

    Returns (v_ld, converged, report); ``report.farley_trace`` holds the
    (v_rmlp, Farley bound) pair of every exact pricing call.
    """
    s = _Solver(instance, config or BnpConfig(), prune=False)
    root = BnpNode((s.root_lb, 0, 0), BranchState(), s.root_lb)
    out = s.process(root)
    s.report.nodes = 1
    s.report.time = time.perf_counter() - s.t0
    if out is None:
        raise RuntimeError("root master LP needs artificial columns")
    v_ld, _, _, converged = out
    s.report.root_bound = v_ld
    return v_ld, converged, s.report

"""Restricted master LP over the column pool (set-cover rows)."""
from __future__ import annotations

import math
from typing import Iterable, Optional

import numpy as np

from .instance import (BranchState, Column, SmbpInstance, items_to_mask,
                       respects_branching_mask)
from .lp import INF, LpProblem, LpSolution, solve_lp

EARLY_STOP = False   # ceil(v_ld) == ceil(v_RMLP) stopping rule; off by default


def reduced_cost(duals, column) -> float:
    items = column.items if isinstance(column, Column) else column
    return 1.0 - float(sum(duals[i] for i in items))


def farley_bound(v_rmlp: float, v_price: float) -> float:
    """Lower bound v_RMLP / v_price on the master LP optimum, where v_price is
    an upper bound on the pricing optimum (at least 1 while columns remain)."""
    if v_price <= 0:
        raise ValueError("pricing bound must be positive")
    return v_rmlp / v_price


class MasterLP:
    """The set-cover LP  min sum(lambda)  s.t.  sum_{p ∋ i} lambda_p >= 1.

    One artificial column of cost ``big_cost`` per item keeps it feasible for
    every branching state.  Columns that violate the active branching state
    are kept but fixed to 0.
    """

    def __init__(self, instance: SmbpInstance, columns: Iterable[Column] = (),
                 big_cost: Optional[float] = None):
        self.instance = instance
        n = instance.n
        self.big_cost = 10.0 * n if big_cost is None else big_cost
        self.lp = LpProblem("min")
        for i in range(n):
            self.lp.add_row(">", 1.0)
        for i in range(n):
            self.lp.add_column(self.big_cost, {i: 1.0})
        self.columns: list[Column] = []
        self.masks: list[int] = []
        self._index: dict[int, int] = {}
        self.branch = BranchState()
        self.basis = None
        self.last: Optional[LpSolution] = None
        for col in columns:
            self.add(col)

    @property
    def n_art(self) -> int:
        return self.instance.n

    def __len__(self) -> int:
        return len(self.columns)

    def add(self, column: Column) -> Optional[int]:
        """Insert ``column``; returns its pool index, or None for a duplicate."""
        mask = column.mask
        if mask in self._index:
            return None
        active = respects_branching_mask(mask, self.branch)
        self.lp.add_column(1.0, {i: 1.0 for i in column.items}, 0.0, INF if active else 0.0)
        k = len(self.columns)
        self.columns.append(column)
        self.masks.append(mask)
        self._index[mask] = k
        return k

    def index_of(self, items) -> Optional[int]:
        return self._index.get(items_to_mask(items))

    def set_branch(self, branch: BranchState) -> None:
        self.branch = branch
        for k, mask in enumerate(self.masks):
            ok = respects_branching_mask(mask, branch)
            self.lp.set_bounds(self.n_art + k, 0.0, INF if ok else 0.0)

    def solve(self, basis=None) -> LpSolution:
        sol = solve_lp(self.lp, basis if basis is not None else self.basis)
        if not sol.optimal:
            sol = solve_lp(self.lp, None, bland=True)
        if not sol.optimal:
            raise RuntimeError(f"master LP solve failed: {sol.status}")
        self.basis = sol.basis
        self.last = sol
        return sol

    def lambdas(self, sol: Optional[LpSolution] = None) -> np.ndarray:
        sol = sol or self.last
        return sol.x[self.n_art:]

    def artificial(self, sol: Optional[LpSolution] = None) -> np.ndarray:
        sol = sol or self.last
        return sol.x[:self.n_art]

    def coverage(self, sol: Optional[LpSolution] = None) -> np.ndarray:
        sol = sol or self.last
        return self.lp.A @ sol.x

    def support(self, sol: Optional[LpSolution] = None, tol: float = 1e-9):
        lam = self.lambdas(sol)
        return [(self.columns[k], float(lam[k])) for k in np.flatnonzero(lam > tol)]


def ceil_bound(v: float, tol: float = 1e-6) -> int:
    """Integral lower bound implied by a fractional bin-count bound."""
    return int(math.ceil(v - tol))


def repair_cover(bins: Iterable[Iterable[int]]) -> list[tuple[int, ...]]:
    """Turn a cover into a partition: each item stays in the first bin that
    holds it; emptied bins are dropped.  Bins stay feasible because the
    capacity usage is monotone."""
    seen: set = set()
    out = []
    for b in bins:
        keep = tuple(sorted(i for i in b if i not in seen))
        seen.update(keep)
        if keep:
            out.append(keep)
    return out

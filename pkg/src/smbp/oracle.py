"""Reference solvers used only for validation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .instance import SmbpInstance, mask_to_items
from .lp import LpProblem, basis_without_rows, solve_lp


@dataclass(frozen=True)
class OracleBudget:
    binpack_items: int = 14
    knapsack_items: int = 25

    def __post_init__(self):
        if self.binpack_items <= 0 or self.knapsack_items <= 0:
            raise ValueError("oracle budgets must be positive")


DEFAULT_BUDGET = OracleBudget()


def feasible_masks(instance: SmbpInstance) -> np.ndarray:
    return kernels.subset_feasible(instance.a, instance.b, instance.sigma, instance.capacity)


def exact_bin_packing(instance: SmbpInstance, budget: OracleBudget = DEFAULT_BUDGET):
    """Optimal bin count and one optimal partition, by the subset DP
    bins[mask] = 1 + min over feasible submasks s of mask (holding the lowest
    item of mask) of bins[mask \\ s]."""
    n = instance.n
    if n > budget.binpack_items:
        raise ValueError(f"bin packing oracle refused for n={n} > {budget.binpack_items}")
    if n == 0:
        return 0, []
    count, masks = kernels.min_bins_dp(feasible_masks(instance), n)
    return int(count), [mask_to_items(int(m)) for m in masks]


def enumerate_partitions_count(instance: SmbpInstance) -> int:
    """Optimum by explicit enumeration of set partitions (n <= 8); an
    independent cross-check of the DP."""
    n = instance.n
    if n > 10:
        raise ValueError("partition enumeration is limited to n <= 10")
    feas = feasible_masks(instance)
    best = [n]

    def rec(i, bins):
        if len(bins) >= best[0]:
            return
        if i == n:
            best[0] = len(bins)
            return
        for k in range(len(bins)):
            nb = bins[k] | (1 << i)
            if feas[nb]:
                bins[k] = nb
                rec(i + 1, bins)
                bins[k] ^= 1 << i
        bins.append(1 << i)
        rec(i + 1, bins)
        bins.pop()

    rec(0, [])
    return best[0]


def all_feasible_columns(instance: SmbpInstance, max_items: int = 14) -> list[tuple[int, ...]]:
    if instance.n > max_items:
        raise ValueError(f"column enumeration refused for n={instance.n}")
    feas = feasible_masks(instance)
    return [mask_to_items(m) for m in range(1, 1 << instance.n) if feas[m]]


def full_master_lp(instance: SmbpInstance, max_items: int = 14) -> float:
    """Set-cover LP value over every feasible column."""
    lp = LpProblem("min")
    for _ in range(instance.n):
        lp.add_row(">", 1.0)
    for items in all_feasible_columns(instance, max_items):
        lp.add_column(1.0, {i: 1.0 for i in items})
    sol = solve_lp(lp)
    if not sol.optimal:
        raise RuntimeError(f"full master LP: {sol.status}")
    return sol.objective


def kelley_compact_relaxation(instance: SmbpInstance, m_bins: int | None = None,
                              tol: float = 1e-6, max_iter: int = 1000):
    """Continuous relaxation of the compact assignment model by Kelley cuts.

    Variables v_ij in [0, 1] (item i in bin j) and y_j in [0, 1]; rows
    sum_j v_ij = 1; and for every bin the convex constraint
    g_j = sum_i a_i v_ij + sigma * sqrt(sum_i b_i v_ij^2) - c y_j <= 0,
    outer-approximated by gradient cuts at LP points until no g_j exceeds
    ``tol`` bins (tol * c in load units).  Returns (value, converged); the
    value is a lower bound on the relaxation either way.
    """
    n = instance.n
    m = n if m_bins is None else int(m_bins)
    a, b, s, c = instance.a, instance.b, instance.sigma, instance.capacity
    lp = LpProblem("min")
    for _ in range(n):
        lp.add_row("=", 1.0)
    vidx = np.empty((n, m), dtype=np.int64)
    for j in range(m):
        for i in range(n):
            vidx[i, j] = lp.add_column(0.0, {i: 1.0}, 0.0, 1.0)
    yidx = [lp.add_column(1.0, None, 0.0, 1.0) for _ in range(m)]
    # linear part of the capacity rows: valid since sqrt(...) >= 0
    for j in range(m):
        row = {int(vidx[i, j]): a[i] for i in range(n)}
        row[yidx[j]] = -c
        lp.add_row("<", 0.0, row)
    base_rows = lp.nrows
    basis = None
    value = -math.inf
    for _ in range(max_iter):
        sol = solve_lp(lp, basis)
        if not sol.optimal:
            raise RuntimeError(f"Kelley LP: {sol.status}")
        basis = sol.basis
        value = sol.objective
        # drop cuts that are slack at the optimum: the LP value is unchanged,
        # so the sequence of values stays nondecreasing
        in_basis = set(basis.head)
        slack = [i for i in range(base_rows, lp.nrows)
                 if -(i + 1) in in_basis and lp.A[i] @ sol.x < -1e-7]
        if slack:
            lp.remove_rows(slack)
            basis = basis_without_rows(basis, slack)
        v = sol.x[vidx]
        y = sol.x[yidx]
        worst = 0.0
        for j in range(m):
            root = math.sqrt(float(b @ (v[:, j] ** 2)) + 1e-12)
            g = float(a @ v[:, j]) + s * root - c * y[j]
            if g > tol * c:
                worst = max(worst, g)
                # gradient of g_j at (v, y); the cut is g(p) + grad (x - p) <= 0,
                # which for this positively homogeneous g reduces to grad x <= 0
                grad = a + s * b * v[:, j] / root
                row = {int(vidx[i, j]): grad[i] for i in range(n)}
                row[yidx[j]] = -c
                lp.add_row("<", 0.0, row)
        if worst <= tol:
            return value, True
    return value, False

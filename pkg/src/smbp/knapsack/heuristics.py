"""Greedy pricing heuristics."""
from __future__ import annotations

import numpy as np

from .. import kernels
from .problem import KnapsackProblem


def _args(problem: KnapsackProblem):
    return (problem.a, problem.b, problem.profits, problem.sigma, problem.capacity,
            problem.conflict_matrix)


def best_fit_greedy(problem: KnapsackProblem, forced=()) -> np.ndarray:
    """Add the fitting, conflict-free item with the best profit per unit of
    incremental capacity usage until nothing fits.  ``forced`` items start in
    the bin."""
    init = np.zeros(problem.m, dtype=np.uint8)
    init[list(forced)] = 1
    return kernels.greedy_fill(*_args(problem), init, kernels.RULE_RATIO)


def fixing_greedy(problem: KnapsackProblem) -> tuple[np.ndarray, float]:
    """Best best-fit-greedy solution over all single-item fixings."""
    if problem.m == 0:
        return np.zeros(0, dtype=np.uint8), 0.0
    x, val = kernels.fixing_greedy(*_args(problem))
    return np.asarray(x, dtype=np.uint8), float(val)


def max_cardinality_greedy(problem: KnapsackProblem) -> np.ndarray:
    """Fill a bin with as many items as possible by always taking the item of
    smallest incremental usage (profits are ignored)."""
    return kernels.greedy_fill(*_args(problem), np.zeros(problem.m, dtype=np.uint8),
                               kernels.RULE_MIN_INCREMENT)

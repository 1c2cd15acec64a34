"""Linearization cuts of the capacity constraint at infeasible 0/1 points."""
from __future__ import annotations

import math

import numpy as np

from ..instance import FEAS_TOL
from .problem import KnapsackProblem


def separation_cut(problem: KnapsackProblem, xhat) -> tuple[np.ndarray, float]:
    """Cut ``theta @ x <= capacity`` supporting the capacity function at ``xhat``.

    theta_i = a_i + sigma * b_i * xhat_i / sqrt(b @ xhat).  At a binary point the
    left-hand side equals the capacity usage of ``xhat``, so the cut is violated
    exactly when ``xhat`` is infeasible.  When ``b @ xhat == 0`` the square-root
    term vanishes and the linear part ``a @ x <= capacity`` is used.
    """
    xhat = np.asarray(xhat, dtype=np.float64)
    if np.any((xhat != 0.0) & (xhat != 1.0)):
        raise ValueError("separation point must be binary")
    if problem.usage(xhat) <= problem.capacity + FEAS_TOL:
        raise ValueError("separation point is feasible; nothing to cut")
    B = float(problem.b @ xhat)
    if B <= 0.0 or problem.sigma == 0.0:
        theta = problem.a.copy()
    else:
        theta = problem.a + problem.sigma * problem.b * xhat / math.sqrt(B)
    return theta, problem.capacity


class CutPool:
    """Deduplicated cuts, all valid for the feasible set of one knapsack
    (profits may change between uses, coefficients a, b may not)."""

    def __init__(self):
        self.thetas: list[np.ndarray] = []
        self.origins: list[np.ndarray] = []
        self.rhs: list[float] = []
        self._keys: set = set()

    def __len__(self) -> int:
        return len(self.thetas)

    def add(self, theta: np.ndarray, rhs: float, origin) -> bool:
        key = (np.round(np.asarray(theta) * 1e12).astype(np.int64).tobytes(),
               round(rhs * 1e12))
        if key in self._keys:
            return False
        self._keys.add(key)
        self.thetas.append(np.asarray(theta, dtype=np.float64))
        self.rhs.append(float(rhs))
        self.origins.append(np.asarray(origin, dtype=np.uint8))
        return True

    def separate(self, problem: KnapsackProblem, xhat) -> bool:
        theta, rhs = separation_cut(problem, xhat)
        return self.add(theta, rhs, xhat)

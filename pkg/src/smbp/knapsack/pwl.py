"""Piecewise-linear over-estimation of q(w) = (c - w)^2 and breakpoint rules.

With w = a @ x the capacity constraint reads sigma^2 * b @ x <= q(w) for
w <= c.  Replacing q by the secant interpolant through a set of breakpoints
gives a MILP relaxation; since q is convex the interpolant lies above it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .heuristics import max_cardinality_greedy
from .problem import KnapsackProblem


@dataclass
class PwlModel:
    breakpoints: np.ndarray
    capacity: float
    w_lo: float = 0.0
    w_hi: float = 0.0

    def __post_init__(self):
        bp = np.unique(np.asarray(self.breakpoints, dtype=np.float64))
        if bp.size == 0:
            raise ValueError("at least one breakpoint is required")
        self.breakpoints = bp

    @property
    def values(self) -> np.ndarray:
        return self.q(self.breakpoints)

    def q(self, w):
        return (self.capacity - np.asarray(w, dtype=np.float64)) ** 2

    @property
    def slopes(self) -> np.ndarray:
        w = self.breakpoints
        return np.diff(self.values) / np.diff(w)

    @property
    def intercepts(self) -> np.ndarray:
        return self.values[:-1] - self.slopes * self.breakpoints[:-1]

    def qbar(self, w):
        """Secant interpolant on [min B, max B] (np.interp)."""
        return np.interp(w, self.breakpoints, self.values)

    def max_error(self) -> float:
        """Closed-form sup of qbar - q: the largest (w_k - w_{k-1})^2 / 4."""
        if self.breakpoints.size < 2:
            return 0.0
        return float(np.max(np.diff(self.breakpoints)) ** 2 / 4.0)


def equidistant_error(w_lo: float, w_hi: float, h: int) -> float:
    """Smallest achievable sup error with h breakpoints on [w_lo, w_hi]."""
    return (w_hi - w_lo) ** 2 / (4.0 * (h - 1) ** 2)


def breakpoint_count(problem: KnapsackProblem) -> int:
    """Number of breakpoints: items in a bin filled by the max-cardinality
    greedy, at least 2."""
    return max(2, int(max_cardinality_greedy(problem).sum()))


def build_breakpoints(problem: KnapsackProblem, w_lo: float, w_hi: float,
                      h: Optional[int] = None) -> PwlModel:
    """h equidistant breakpoints on [w_lo, w_hi] plus the point w = 0."""
    if not 0.0 <= w_lo <= w_hi <= problem.capacity + 1e-9:
        raise ValueError(f"need 0 <= w_lo <= w_hi <= c, got [{w_lo}, {w_hi}]")
    if h is None:
        h = breakpoint_count(problem)
    if w_hi == w_lo:
        pts = np.array([0.0, w_hi])
    else:
        pts = np.concatenate([[0.0], np.linspace(w_lo, w_hi, h)])
    return PwlModel(pts, problem.capacity, w_lo, w_hi)


def triangular_breakpoints(w_lo: float, w_hi: float, h: int, w_c: float) -> np.ndarray:
    """h breakpoints on [w_lo, w_hi] whose spacing grows linearly away from w_c.

    The centre index is ceil((w_c - w_lo) / (w_hi - w_lo) * h) clamped to
    [1, h]; below it the gaps are proportional to 1, 2, ..., i_c - 1 and above
    it to 1, 2, ..., h - i_c (smallest next to the centre).
    """
    if w_hi <= w_lo:
        return np.array([w_lo])
    w_c = min(max(w_c, w_lo), w_hi)
    i_c = math.ceil((w_c - w_lo) / (w_hi - w_lo) * h)
    i_c = min(max(i_c, 1), h)
    S_l = (i_c - 1) * i_c // 2
    S_u = (h - i_c) * (h - i_c + 1) // 2
    pts = np.empty(h)
    for i in range(1, h + 1):
        if i < i_c:
            k = i_c - i
            pts[i - 1] = w_c - (k * (k + 1) / 2) / S_l * (w_c - w_lo)
        elif i == i_c:
            pts[i - 1] = w_c
        else:
            k = i - i_c
            pts[i - 1] = w_c + (k * (k + 1) / 2) / S_u * (w_hi - w_c)
    return pts


def adaptive_breakpoints(problem: KnapsackProblem, w_lo: float, w_hi: float,
                         h: int, w_c: Optional[float]) -> PwlModel:
    """Non-equidistant model centred at ``w_c``; equidistant when ``w_c`` is None.

    ``w_hi`` is kept as a breakpoint even when the centre lands on the last
    index, otherwise loads in (w_c, w_hi] would be cut off.
    """
    if w_c is None or w_hi <= w_lo:
        return build_breakpoints(problem, w_lo, w_hi, h)
    pts = triangular_breakpoints(w_lo, w_hi, h, w_c)
    pts = np.concatenate([[0.0, w_lo, w_hi], pts])
    return PwlModel(pts, problem.capacity, w_lo, w_hi)

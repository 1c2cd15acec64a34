"""Submodular knapsack with conflicts: data, results, brute-force oracle."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .. import kernels
from ..instance import FEAS_TOL, MergedPricingProblem, ValidationError

OPTIMAL = "Optimal"
TIME_LIMIT = "TimeLimit"


@dataclass
class KnapsackProblem:
    profits: np.ndarray
    a: np.ndarray
    b: np.ndarray
    sigma: float
    capacity: float
    conflicts: frozenset = frozenset()

    def __post_init__(self):
        self.profits = np.asarray(self.profits, dtype=np.float64)
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.sigma = float(self.sigma)
        self.capacity = float(self.capacity)
        pairs = set()
        for i, j in self.conflicts:
            i, j = int(i), int(j)
            if i == j:
                raise ValidationError("an item cannot conflict with itself")
            pairs.add((min(i, j), max(i, j)))
        self.conflicts = frozenset(pairs)
        if np.any(self.a < 0) or np.any(self.b < 0):
            raise ValidationError("a and b must be nonnegative")
        self._conflict_matrix = None

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def conflict_matrix(self) -> np.ndarray:
        if self._conflict_matrix is None:
            cm = np.zeros((self.m, self.m), dtype=np.uint8)
            for i, j in self.conflicts:
                cm[i, j] = cm[j, i] = 1
            self._conflict_matrix = cm
        return self._conflict_matrix

    @classmethod
    def from_merged(cls, merged: MergedPricingProblem) -> "KnapsackProblem":
        return cls(merged.profits, merged.a, merged.b, merged.sigma,
                   merged.capacity, frozenset(merged.conflicts))

    def with_profits(self, profits) -> "KnapsackProblem":
        other = KnapsackProblem(profits, self.a, self.b, self.sigma,
                                self.capacity, self.conflicts)
        other._conflict_matrix = self._conflict_matrix
        return other

    def usage(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        B = float(self.b @ x)
        return float(self.a @ x) + self.sigma * math.sqrt(max(B, 0.0))

    def is_feasible(self, x) -> bool:
        x = np.asarray(x)
        if self.usage(x) > self.capacity + FEAS_TOL:
            return False
        return all(not (x[i] and x[j]) for i, j in self.conflicts)

    def value(self, x) -> float:
        return float(self.profits @ np.asarray(x, dtype=np.float64))


@dataclass
class KnapsackResult:
    status: str
    x: np.ndarray
    value: float
    dual_bound: float
    nodes: int = 0
    cuts: int = 0
    lp_solves: int = 0
    time: float = 0.0
    cut_points: list = field(default_factory=list)

    @property
    def items(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.x))

    @property
    def gap(self) -> float:
        return self.dual_bound - self.value


def enumerate_knapsack(problem: KnapsackProblem, max_items: int = 25,
                       opt_tol: float = 1e-9) -> KnapsackResult:
    """Exact optimum by exhaustive enumeration of conflict-free feasible sets.

    ``cut_points`` is left empty; ``nodes`` holds the number of optimal sets.
    """
    if problem.m > max_items:
        raise ValueError(f"enumeration refused for m={problem.m} > {max_items}")
    if problem.m == 0:
        return KnapsackResult(OPTIMAL, np.zeros(0, dtype=np.uint8), 0.0, 0.0, nodes=1)
    val, sel, n_opt = kernels.knapsack_enum(problem.a, problem.b, problem.profits,
                                            problem.sigma, problem.capacity,
                                            problem.conflict_matrix, opt_tol)
    return KnapsackResult(OPTIMAL, sel, float(val), float(val), nodes=int(n_opt))


def feasible_sets(problem: KnapsackProblem):
    """Yield every conflict-free feasible 0/1 vector (tests and cut validation)."""
    m = problem.m
    for mask in range(1 << m):
        x = np.array([(mask >> i) & 1 for i in range(m)], dtype=np.uint8)
        if problem.is_feasible(x):
            yield x


def knapsack_to_dict(problem: KnapsackProblem) -> dict:
    return {
        "n": problem.m,
        "capacity": problem.capacity,
        "sigma": problem.sigma,
        "a": [float(v) for v in problem.a],
        "b": [float(v) for v in problem.b],
        "profits": [float(v) for v in problem.profits],
        "conflicts": [list(p) for p in sorted(problem.conflicts)],
    }


def read_knapsack(path) -> KnapsackProblem:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    for key in ("a", "b", "sigma", "capacity", "profits"):
        if key not in d:
            raise ValidationError(f"knapsack file lacks '{key}'")
    if not (len(d["a"]) == len(d["b"]) == len(d["profits"])):
        raise ValidationError("a, b and profits differ in length")
    m = len(d["a"])
    conflicts = []
    for pair in d.get("conflicts", []):
        if len(pair) != 2 or not all(0 <= int(v) < m for v in pair):
            raise ValidationError(f"bad conflict pair {pair}")
        conflicts.append(tuple(int(v) for v in pair))
    return KnapsackProblem(d["profits"], d["a"], d["b"], d["sigma"], d["capacity"],
                           frozenset(conflicts))


def write_knapsack(problem: KnapsackProblem, path) -> None:
    Path(path).write_text(json.dumps(knapsack_to_dict(problem), indent=1) + "\n")


def random_knapsack(rng: np.random.Generator, m: int, case: Optional[str] = None,
                    conflict_prob: float = 0.0, capacity: float = 72.0) -> KnapsackProblem:
    """Random pricing-like problem whose items all fit alone.

    With ``case`` in G/H/D the coefficients come from the instance generator,
    otherwise from simple uniform draws.
    """
    if case is not None:
        from ..generator import GeneratorConfig, generate
        alpha = float(rng.choice([0.6, 0.7, 0.8, 0.9, 0.95, 0.99]))
        inst = generate(GeneratorConfig(m, alpha, case, int(rng.integers(2**31)), capacity))
        a, b, sigma = inst.a, inst.b, inst.sigma
        # pricing problems in a bin-packing tree carry merged (bigger) items
        scale = rng.uniform(1.0, 4.0)
        a, b = a * scale, b * scale
        s = a + sigma * np.sqrt(b)
        t = np.minimum(1.0, capacity / s)
        a, b = a * t, b * t * t
    else:
        sigma = float(rng.uniform(0.0, 2.0))
        a = rng.uniform(0.0, capacity / 3, m)
        b = rng.uniform(0.0, (capacity / 4) ** 2, m)
        s = a + sigma * np.sqrt(b)
        t = np.minimum(1.0, capacity / s)
        a, b = a * t, b * t * t
    profits = rng.uniform(0.0, 1.0, m)
    conflicts = set()
    if conflict_prob > 0:
        for i in range(m):
            for j in range(i + 1, m):
                if rng.random() < conflict_prob:
                    conflicts.add((i, j))
    return KnapsackProblem(profits, a, b, sigma, capacity, frozenset(conflicts))

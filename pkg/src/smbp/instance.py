"""SMBP instances, columns, branching state and the merge preprocessing that
turns a branch-and-price node plus master duals into a pricing problem."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

FEAS_TOL = 1e-9


class ValidationError(ValueError):
    """Raised for malformed or inconsistent instance data."""


class InfeasibleBranch(Exception):
    """A together-component contains an apart pair; no column can respect it."""


@dataclass(frozen=True)
class SmbpInstance:
    a: np.ndarray
    b: np.ndarray
    sigma: float
    capacity: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "capacity", float(self.capacity))
        a.setflags(write=False)
        b.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.a)

    def validate(self) -> "SmbpInstance":
        if self.a.ndim != 1 or self.a.shape != self.b.shape:
            raise ValidationError("a and b must be vectors of equal length")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ValidationError("coefficients must be finite")
        if np.any(self.a < 0) or np.any(self.b < 0):
            raise ValidationError("coefficients a and b must be nonnegative")
        if not self.sigma >= 0:
            raise ValidationError("sigma must be nonnegative")
        if not self.capacity > 0:
            raise ValidationError("capacity must be positive")
        single = self.a + self.sigma * np.sqrt(self.b)
        bad = np.flatnonzero(single > self.capacity + FEAS_TOL)
        if bad.size:
            raise ValidationError(
                f"item {int(bad[0])} does not fit into an empty bin "
                f"(usage {single[bad[0]]:.6g} > capacity {self.capacity:.6g})")
        return self


def capacity_usage(instance: SmbpInstance, items: Iterable[int]) -> float:
    """a(S) + sigma * sqrt(b(S)); the empty set uses nothing."""
    idx = list(items)
    if not idx:
        return 0.0
    A = float(sum(instance.a[i] for i in idx))
    if instance.sigma == 0.0:
        return A
    return A + instance.sigma * math.sqrt(float(sum(instance.b[i] for i in idx)))


def incremental_usage(instance: SmbpInstance, packed: Iterable[int], i: int) -> float:
    packed = set(packed)
    if i in packed:
        raise ValueError(f"item {i} is already packed")
    return capacity_usage(instance, packed | {i}) - capacity_usage(instance, packed)


def is_feasible_column(instance: SmbpInstance, items: Iterable[int]) -> bool:
    return capacity_usage(instance, items) <= instance.capacity + FEAS_TOL


def items_to_mask(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        mask |= 1 << i
    return mask


def mask_to_items(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class Column:
    items: tuple[int, ...]
    usage: float

    @property
    def mask(self) -> int:
        return items_to_mask(self.items)

    @classmethod
    def make(cls, instance: SmbpInstance, items: Iterable[int]) -> "Column":
        items = tuple(sorted(set(int(i) for i in items)))
        if not items:
            raise ValueError("a column must contain at least one item")
        usage = capacity_usage(instance, items)
        if usage > instance.capacity + FEAS_TOL:
            raise ValueError(f"column {items} exceeds the capacity ({usage:.6g})")
        return cls(items, usage)


def _pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError("a branching pair needs two distinct items")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class BranchState:
    together: frozenset = frozenset()
    apart: frozenset = frozenset()

    def with_together(self, i: int, j: int) -> "BranchState":
        return BranchState(self.together | {_pair(i, j)}, self.apart)

    def with_apart(self, i: int, j: int) -> "BranchState":
        return BranchState(self.together, self.apart | {_pair(i, j)})


def respects_branching(column, branch: BranchState) -> bool:
    items = set(column.items if isinstance(column, Column) else column)
    for i, j in branch.together:
        if (i in items) != (j in items):
            return False
    for i, j in branch.apart:
        if i in items and j in items:
            return False
    return True


def respects_branching_mask(mask: int, branch: BranchState) -> bool:
    for i, j in branch.together:
        if ((mask >> i) & 1) != ((mask >> j) & 1):
            return False
    for i, j in branch.apart:
        if (mask >> i) & 1 and (mask >> j) & 1:
            return False
    return True


def together_groups(n: int, together: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Connected components of the together relation, ordered by smallest member."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in together:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return sorted((tuple(c) for c in comps.values()), key=lambda g: g[0])


@dataclass
class MergedPricingProblem:
    groups: list[tuple[int, ...]]
    a: np.ndarray
    b: np.ndarray
    profits: np.ndarray
    conflicts: set
    capacity: float
    sigma: float

    @property
    def m(self) -> int:
        return len(self.groups)

    def expand(self, selected: Iterable[int]) -> tuple[int, ...]:
        """Original items of the selected merged items."""
        out = []
        for g in selected:
            out.extend(self.groups[g])
        return tuple(sorted(out))


def merge_preprocess(instance: SmbpInstance, branch: BranchState,
                     duals: Optional[np.ndarray] = None) -> MergedPricingProblem:
    n = instance.n
    groups = together_groups(n, branch.together)
    where = np.empty(n, dtype=np.int64)
    for g, members in enumerate(groups):
        where[list(members)] = g
    conflicts = set()
    for i, j in branch.apart:
        gi, gj = int(where[i]), int(where[j])
        if gi == gj:
            raise InfeasibleBranch(
                f"items {i} and {j} are forced both together and apart")
        conflicts.add((min(gi, gj), max(gi, gj)))
    pi = np.zeros(n) if duals is None else np.asarray(duals, dtype=np.float64)
    m = len(groups)
    a = np.zeros(m)
    b = np.zeros(m)
    p = np.zeros(m)
    for g, members in enumerate(groups):
        idx = list(members)
        a[g] = instance.a[idx].sum()
        b[g] = instance.b[idx].sum()
        p[g] = pi[idx].sum()
    return MergedPricingProblem(groups, a, b, p, conflicts,
                                instance.capacity, instance.sigma)


# --- file formats -----------------------------------------------------------

def instance_to_dict(instance: SmbpInstance) -> dict:
    d = {
        "n": instance.n,
        "capacity": instance.capacity,
        "sigma": instance.sigma,
        "a": [float(x) for x in instance.a],
        "b": [float(x) for x in instance.b],
    }
    if instance.meta:
        d["meta"] = dict(instance.meta)
    return d


def instance_from_dict(d: dict) -> SmbpInstance:
    try:
        a = d["a"]
        b = d["b"]
        capacity = d["capacity"]
        sigma = d["sigma"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"missing instance field: {exc}") from None
    if not isinstance(a, list) or not isinstance(b, list):
        raise ValidationError("a and b must be JSON arrays")
    if "n" in d and d["n"] != len(a):
        raise ValidationError(f"n={d['n']} does not match len(a)={len(a)}")
    if len(a) != len(b):
        raise ValidationError("a and b differ in length")
    try:
        inst = SmbpInstance(np.array(a, dtype=np.float64), np.array(b, dtype=np.float64),
                            float(sigma), float(capacity), dict(d.get("meta") or {}))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"non-numeric instance data: {exc}") from None
    return inst.validate()


def read_instance(path) -> SmbpInstance:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    return instance_from_dict(d)


def write_instance(instance: SmbpInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=1) + "\n")


def write_solution(path, objective: int, dual_bound: float, bins, stats: dict) -> None:
    d = {
        "objective": int(objective),
        "dual_bound": float(dual_bound),
        "bins": [sorted(int(i) for i in bin_) for bin_ in bins],
        "stats": stats,
    }
    Path(path).write_text(json.dumps(d, indent=1) + "\n")


def read_solution(path) -> dict:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from None
    for key in ("objective", "dual_bound", "bins"):
        if key not in d:
            raise ValidationError(f"solution file lacks '{key}'")
    d.setdefault("stats", {})
    return d


def verify_partition(instance: SmbpInstance, bins) -> None:
    """Raise ValidationError unless ``bins`` partitions all items into feasible bins."""
    seen = []
    for bin_ in bins:
        if not bin_:
            raise ValidationError("empty bin in solution")
        if not is_feasible_column(instance, bin_):
            raise ValidationError(f"bin {sorted(bin_)} exceeds the capacity")
        seen.extend(bin_)
    if sorted(seen) != list(range(instance.n)):
        raise ValidationError("bins do not partition the item set")

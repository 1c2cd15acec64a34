import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smbp.generator import GeneratorConfig, generate
from smbp.instance import (BranchState, Column, InfeasibleBranch, SmbpInstance, ValidationError,
                           capacity_usage, incremental_usage, instance_to_dict,
                           is_feasible_column, items_to_mask, mask_to_items, merge_preprocess,
                           read_instance, read_solution, respects_branching,
                           respects_branching_mask, together_groups, verify_partition,
                           write_instance, write_solution)


def test_capacity_usage_examples(tiny):
    inst = SmbpInstance([1.0, 2.0], [4.0, 9.0], 1.0, 10.0)
    assert capacity_usage(inst, [0, 1]) == pytest.approx(3 + math.sqrt(13))
    assert capacity_usage(inst, [0, 1]) == pytest.approx(6.6056, abs=1e-4)
    linear = SmbpInstance([1.0, 2.0], [4.0, 9.0], 0.0, 10.0)
    assert capacity_usage(linear, [0, 1]) == 3.0
    assert capacity_usage(tiny, []) == 0.0


def test_incremental_usage(tiny):
    assert incremental_usage(tiny, [], 0) == pytest.approx(3.0)
    assert incremental_usage(tiny, [0], 1) == pytest.approx(2 + math.sqrt(8) - 3)
    with pytest.raises(ValueError):
        incremental_usage(tiny, [0], 0)


def test_feasibility(tiny):
    assert not is_feasible_column(tiny, [0, 1])
    assert is_feasible_column(tiny, [0])
    roomy = SmbpInstance(tiny.a, tiny.b, 1.0, 5.0)
    assert is_feasible_column(roomy, [0, 1])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 50)), min_size=3, max_size=7),
       st.floats(0, 3), st.data())
def test_usage_is_monotone_submodular(items, sigma, data):
    a = np.array([p[0] for p in items])
    b = np.array([p[1] for p in items])
    inst = SmbpInstance(a, b, sigma, 1e6)
    n = len(items)
    T = set(data.draw(st.lists(st.integers(0, n - 1), unique=True)))
    S = set(data.draw(st.lists(st.sampled_from(sorted(T)), unique=True))) if T else set()
    i = data.draw(st.integers(0, n - 1))
    assert capacity_usage(inst, S) <= capacity_usage(inst, T) + 1e-9
    if i not in T:
        gain_s = capacity_usage(inst, S | {i}) - capacity_usage(inst, S)
        gain_t = capacity_usage(inst, T | {i}) - capacity_usage(inst, T)
        assert gain_s >= gain_t - 1e-9


def test_masks_round_trip():
    assert items_to_mask([0, 2, 5]) == 0b100101
    assert mask_to_items(0b100101) == (0, 2, 5)
    assert mask_to_items(0) == ()


def test_column_make(tiny):
    c = Column.make(tiny, [1, 0, 1][:1])
    assert c.items == (1,) and c.usage == pytest.approx(3.0)
    with pytest.raises(ValueError):
        Column.make(tiny, [0, 1])
    with pytest.raises(ValueError):
        Column.make(tiny, [])


def test_merge_examples():
    inst = SmbpInstance([1.0, 2.0, 3.0], [0.0, 0.0, 0.0], 0.0, 10.0)
    m = merge_preprocess(inst, BranchState(frozenset({(0, 1)}), frozenset()))
    assert m.groups == [(0, 1), (2,)]
    assert list(m.a) == [3.0, 3.0]
    m = merge_preprocess(inst, BranchState(frozenset(), frozenset({(0, 2)})))
    assert m.groups == [(0,), (1,), (2,)] and m.conflicts == {(0, 2)}
    m = merge_preprocess(inst, BranchState(frozenset({(0, 1)}), frozenset({(1, 2)})))
    assert m.conflicts == {(0, 1)}          # merged item {0,1} vs item {2}
    assert m.expand([0]) == (0, 1)
    with pytest.raises(InfeasibleBranch):
        merge_preprocess(inst, BranchState(frozenset({(0, 1)}), frozenset({(0, 1)})))


def test_merge_folds_duals():
    inst = SmbpInstance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.0, 20.0)
    m = merge_preprocess(inst, BranchState().with_together(2, 0), np.array([0.5, 0.25, 0.125]))
    assert m.groups == [(0, 2), (1,)]
    assert list(m.profits) == [0.625, 0.25]
    assert list(m.b) == [4.0, 2.0]


def test_respects_branching():
    br = BranchState(frozenset({(0, 1)}), frozenset())
    assert respects_branching((0, 1), br)
    assert not respects_branching((0,), br)
    assert not respects_branching((0, 2), BranchState(frozenset(), frozenset({(0, 2)})))
    assert respects_branching_mask(0b011, br) and not respects_branching_mask(0b001, br)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 255), st.integers(0, 7), st.integers(0, 7))
def test_branch_children_dichotomy(mask, i, j):
    if i == j:
        return
    base = BranchState()
    t, d = base.with_together(i, j), base.with_apart(i, j)
    # every column lies on at least one side
    assert respects_branching_mask(mask, t) or respects_branching_mask(mask, d)


def test_together_groups():
    assert together_groups(5, [(3, 1), (1, 4)]) == [(0,), (1, 3, 4), (2,)]


def test_validation_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"n": 1, "capacity": 72, "sigma": 0, "a": [1], "b": [0]}))
    assert read_instance(p).n == 1
    p.write_text(json.dumps({"n": 1, "capacity": 72, "sigma": 0, "a": [-1], "b": [0]}))
    with pytest.raises(ValidationError, match="nonnegative"):
        read_instance(p)
    p.write_text("{not json")
    with pytest.raises(ValidationError, match="malformed"):
        read_instance(p)
    p.write_text(json.dumps({"capacity": 3, "sigma": 1, "a": [1], "b": [16]}))
    with pytest.raises(ValidationError, match="does not fit"):
        read_instance(p)
    p.write_text(json.dumps({"n": 2, "capacity": 3, "sigma": 1, "a": [1], "b": [1]}))
    with pytest.raises(ValidationError):
        read_instance(p)


def test_instance_round_trip(tmp_path):
    inst = generate(GeneratorConfig(20, 0.9, "H", 3))
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_instance(inst, p1)
    write_instance(read_instance(p1), p2)
    assert p1.read_text() == p2.read_text()
    back = read_instance(p1)
    assert np.array_equal(back.a, inst.a) and np.array_equal(back.b, inst.b)
    assert back.meta == {"case": "H", "alpha": 0.9, "seed": 3}
    assert instance_to_dict(back) == instance_to_dict(inst)


def test_solution_io_and_verification(tmp_path, tiny):
    p = tmp_path / "sol.json"
    write_solution(p, 2, 1.5, [(1,), (0,)], {"nodes": 1})
    d = read_solution(p)
    assert d["objective"] == 2 and d["bins"] == [[1], [0]] and d["stats"] == {"nodes": 1}
    verify_partition(tiny, d["bins"])
    with pytest.raises(ValidationError, match="capacity"):
        verify_partition(tiny, [(0, 1)])
    with pytest.raises(ValidationError, match="partition"):
        verify_partition(tiny, [(0,)])
    p.write_text("{}")
    with pytest.raises(ValidationError):
        read_solution(p)


def test_linear_usage_is_exact_sum():
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 10, 12)
    inst = SmbpInstance(a, rng.uniform(0, 10, 12), 0.0, 1e3)
    items = [1, 4, 5, 9]
    assert capacity_usage(inst, items) == sum(a[i] for i in items)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_merged_solutions_respect_branching(seed):
    rng = np.random.default_rng(seed)
    n = 7
    inst = SmbpInstance(rng.uniform(0, 5, n), rng.uniform(0, 5, n), 1.0, 100.0)
    br = BranchState()
    for _ in range(3):
        i, j = rng.choice(n, 2, replace=False)
        br = br.with_together(int(i), int(j)) if rng.random() < 0.5 else br.with_apart(int(i), int(j))
    try:
        merged = merge_preprocess(inst, br)
    except InfeasibleBranch:
        return
    for sel in range(1, 1 << merged.m):
        chosen = [g for g in range(merged.m) if (sel >> g) & 1]
        if any((min(x, y), max(x, y)) in merged.conflicts for x in chosen for y in chosen if x < y):
            continue
        assert respects_branching(merged.expand(chosen), br)

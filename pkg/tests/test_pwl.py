import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smbp.knapsack import (KnapsackProblem, PwlModel, adaptive_breakpoints, build_breakpoints,
                           equidistant_error, triangular_breakpoints)


def line_problem(c=2.0):
    return KnapsackProblem([1.0], [1.0], [1.0], 1.0, c)


def test_equidistant_example():
    pwl = build_breakpoints(line_problem(2.0), 0.0, 2.0, 3)
    assert list(pwl.breakpoints) == [0.0, 1.0, 2.0]
    assert pwl.max_error() == pytest.approx(0.25) == equidistant_error(0.0, 2.0, 3)
    mids = np.array([0.5, 1.5])
    assert pwl.qbar(mids) - pwl.q(mids) == pytest.approx([0.25, 0.25])
    assert pwl.qbar(pwl.breakpoints) == pytest.approx(pwl.q(pwl.breakpoints))


def test_build_breakpoints_adds_zero_and_degenerate_case():
    p = line_problem(10.0)
    pwl = build_breakpoints(p, 4.0, 8.0, 3)
    assert list(pwl.breakpoints) == [0.0, 4.0, 6.0, 8.0]
    assert list(build_breakpoints(p, 5.0, 5.0, 4).breakpoints) == [0.0, 5.0]
    with pytest.raises(ValueError):
        build_breakpoints(p, 6.0, 5.0)
    with pytest.raises(ValueError):
        build_breakpoints(p, 0.0, 11.0)


def test_segments_interpolate():
    pwl = PwlModel(np.array([0.0, 1.0, 3.0]), 4.0)
    assert pwl.slopes == pytest.approx([-7.0, -4.0])
    assert pwl.intercepts == pytest.approx([16.0, 13.0])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0.0, 72.0), min_size=2, max_size=12, unique=True), st.integers(0, 10 ** 6))
def test_overestimation_bound(points, seed):
    pwl = PwlModel(np.array(points), 72.0)
    lo, hi = pwl.breakpoints[0], pwl.breakpoints[-1]
    w = np.random.default_rng(seed).uniform(lo, hi, 10 ** 4)
    gap = pwl.qbar(w) - pwl.q(w)
    assert np.all(gap >= -1e-9)
    assert np.all(gap <= pwl.max_error() + 1e-9)
    # midpoint attainment on the widest segment
    k = int(np.argmax(np.diff(pwl.breakpoints)))
    mid = 0.5 * (pwl.breakpoints[k] + pwl.breakpoints[k + 1])
    assert float(pwl.qbar(mid) - pwl.q(mid)) == pytest.approx(pwl.max_error(), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 30.0), st.floats(1.0, 40.0), st.integers(2, 10), st.integers(0, 10 ** 6))
def test_equidistant_beats_random_sets(w_lo, width, h, seed):
    w_hi = w_lo + width
    eq = PwlModel(np.linspace(w_lo, w_hi, h), 72.0)
    inner = np.random.default_rng(seed).uniform(w_lo, w_hi, h - 2)
    other = PwlModel(np.concatenate([[w_lo], inner, [w_hi]]), 72.0)
    if other.breakpoints.size == h:
        assert other.max_error() >= eq.max_error() - 1e-12


def test_triangular_fixture():
    # hand evaluation: i_c = 3, S_l = 1 + 2 = 3; gaps 1/3 and 2/3 below the centre
    assert triangular_breakpoints(0.0, 1.0, 3, 1.0) == pytest.approx([0.0, 2.0 / 3.0, 1.0])
    # i_c = ceil(0.2 * 5) = 1: the centre is the first point, S_u = 10
    assert triangular_breakpoints(0.0, 10.0, 5, 2.0) == pytest.approx([2.0, 2.8, 4.4, 6.8, 10.0])


def _reference_triangular(w_lo, w_hi, h, w_c):
    """Independent form: cumulative sums of linearly growing gaps."""
    i_c = min(max(int(np.ceil((w_c - w_lo) / (w_hi - w_lo) * h)), 1), h)
    left = np.cumsum(np.arange(1, i_c))[::-1]
    right = np.cumsum(np.arange(1, h - i_c + 1))
    below = w_c - left / left[0] * (w_c - w_lo) if left.size else np.zeros(0)
    above = w_c + right / right[-1] * (w_hi - w_c) if right.size else np.zeros(0)
    return np.concatenate([below, [w_c], above])


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 30.0), st.floats(0.5, 40.0), st.integers(2, 12), st.floats(0.0, 1.0))
def test_triangular_properties(w_lo, width, h, frac):
    w_hi = w_lo + width
    w_c = w_lo + frac * width
    pts = triangular_breakpoints(w_lo, w_hi, h, w_c)
    assert pts.size == h
    assert np.all(np.diff(pts) > 0)
    assert pts == pytest.approx(_reference_triangular(w_lo, w_hi, h, w_c), abs=1e-9)


@pytest.mark.parametrize("h", [3, 5, 7, 9])
def test_triangular_symmetric_about_midpoint(h):
    pts = triangular_breakpoints(2.0, 6.0, h, 4.0)
    assert pts + pts[::-1] == pytest.approx(np.full(h, 8.0))


def test_adaptive_model_keeps_interval_ends():
    p = line_problem(10.0)
    pwl = adaptive_breakpoints(p, 2.0, 8.0, 4, 8.0)
    assert {0.0, 2.0, 8.0} <= set(pwl.breakpoints)
    eq = adaptive_breakpoints(p, 2.0, 8.0, 4, None)
    assert list(eq.breakpoints) == list(build_breakpoints(p, 2.0, 8.0, 4).breakpoints)

"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.  The last
criterion solves a 108-instance suite at n=40 in a few minutes on one core
(108 x 120 s at worst); set SMBP_ACCEPT_JOBS to use more processes.
"""
from __future__ import annotations

import functools
import itertools
import math
import os
import time

import numpy as np
import pytest

from smbp.bnp import BnpConfig, greedy_min_utilization, solve_bnp, solve_root
from smbp.generator import ALPHAS, CASES, GeneratorConfig, generate, generate_suite
from smbp.harness import (aggregate, aggregate_path, read_rows, run_benchmark,
                          write_aggregate)
from smbp.instance import SmbpInstance, read_instance, verify_partition
from smbp.knapsack import (CutPool, KnapsackProblem, PwlModel, enumerate_knapsack,
                           equidistant_error, feasible_sets, random_knapsack,
                           solve_knapsack, solve_pwl_bnc)
from smbp.oracle import exact_bin_packing, full_master_lp, kelley_compact_relaxation


def report(label: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


# ------------------------------------------------------------ shared data

@functools.lru_cache(maxsize=None)
def oracle_configs() -> tuple[GeneratorConfig, ...]:
    """150 configurations drawn without replacement (fixed seed) from the
    full n in 6..12 x G/H/D x {0.6, 0.9, 0.99} x seeds 0..4 grid."""
    grid = [GeneratorConfig(n, alpha, case, seed)
            for n in range(6, 13) for case in CASES
            for alpha in (0.6, 0.9, 0.99) for seed in range(5)]
    pick = np.random.default_rng(2024).choice(len(grid), size=150, replace=False)
    return tuple(grid[k] for k in sorted(pick))


@functools.lru_cache(maxsize=None)
def oracle_runs() -> list[dict]:
    runs = []
    for cfg in oracle_configs():
        inst = generate(cfg)
        opt, _ = exact_bin_packing(inst)
        row = {"cfg": cfg, "inst": inst, "opt": opt}
        for mode in ("exact", "hybrid"):
            t0 = time.perf_counter()
            rep, bins = solve_bnp(inst, BnpConfig(time_limit=60.0, pricing=mode))
            row[mode] = (rep, bins, time.perf_counter() - t0)
        runs.append(row)
    return runs


def random_instance(rng: np.random.Generator, n: int) -> SmbpInstance:
    """Denser than generator instances at small n, so several bins are needed."""
    sigma = float(rng.uniform(0.0, 2.5))
    a = rng.uniform(2.0, 30.0, n)
    b = rng.uniform(0.0, 150.0, n)
    t = np.minimum(1.0, 72.0 / (a + sigma * np.sqrt(b)))
    return SmbpInstance(a * t, b * t * t, sigma, 72.0)


# ------------------------------------------------------------ criteria

def test_c01_oracle_bin_packing():
    runs = oracle_runs()
    bad = [r["cfg"] for r in runs
           if r["exact"][0].objective != r["opt"] or r["exact"][0].status != "Optimal"
           or r["exact"][2] > 60.0]
    for r in runs:
        verify_partition(r["inst"], r["exact"][1])
    slowest = max(r["exact"][2] for r in runs)
    ok = not bad and len(runs) == 150
    report("C1 oracle equivalence, bin packing", ok,
           f"{len(runs) - len(bad)}/{len(runs)} match, slowest {slowest:.2f}s")
    assert ok, bad[:5]


def test_c02_oracle_knapsack():
    rng = np.random.default_rng(7)
    worst_gap, bad, n_conf = 0.0, [], 0
    for k in range(200):
        m = int(rng.integers(1, 16))
        case = [None, "G", "H", "D"][k % 4]
        cp = 0.0 if k % 2 == 0 else float(rng.uniform(0.05, 0.3))
        prob = random_knapsack(rng, m, case, conflict_prob=cp)
        n_conf += bool(prob.conflicts)
        ref = enumerate_knapsack(prob)
        res = solve_knapsack(prob, "pwl")
        err = abs(res.value - ref.value)
        worst_gap = max(worst_gap, err)
        if err > 1e-6 or res.dual_bound < ref.value - 1e-9 or not prob.is_feasible(res.x):
            bad.append((k, m, ref.value, res.value, res.dual_bound))
    ok = not bad
    report("C2 oracle equivalence, knapsack", ok,
           f"{200 - len(bad)}/200 match ({n_conf} with conflicts), worst |diff| {worst_gap:.2e}")
    assert ok, bad[:5]


def test_c03_cut_validity():
    rng = np.random.default_rng(11)
    n_cuts, worst_valid, weakest_cut, bad = 0, -math.inf, math.inf, []
    for k in range(100):
        m = int(rng.integers(2, 13))
        prob = random_knapsack(rng, m, [None, "G", "H", "D"][k % 4],
                               conflict_prob=0.1 if k % 3 == 0 else 0.0)
        pool = CutPool()
        # coarse breakpoints make the relaxation loose, so cuts are needed
        pwl = PwlModel(np.array([0.0, prob.capacity]), prob.capacity, 0.0, prob.capacity)
        solve_pwl_bnc(prob, pwl, cut_pool=pool)
        if not len(pool):
            continue
        feas = np.array(list(feasible_sets(prob)), dtype=np.float64)
        for theta, rhs, origin in zip(pool.thetas, pool.rhs, pool.origins):
            n_cuts += 1
            viol = float(np.max(feas @ theta - rhs)) if len(feas) else -math.inf
            cut_off = float(theta @ origin - rhs)
            worst_valid = max(worst_valid, viol)
            weakest_cut = min(weakest_cut, cut_off)
            if viol > 1e-9 or cut_off <= 1e-9:
                bad.append((k, viol, cut_off))
    ok = not bad and n_cuts > 0
    report("C3 cut validity", ok,
           f"{n_cuts} cuts; max violation on feasible points {worst_valid:.2e}, "
           f"min violation at origin {weakest_cut:.3g}")
    assert ok, bad[:5]


def grid_error(pwl: PwlModel, w_lo: float, w_hi: float, points: int) -> float:
    w = np.linspace(w_lo, w_hi, points)
    return float(np.max(pwl.qbar(w) - pwl.q(w)))


def test_c04_equidistant_optimal():
    # 10081 = 1 + 4 * lcm(1..9): the uniform grid holds every segment midpoint
    # of every equidistant set with h <= 10 breakpoints
    points = 10081
    rng = np.random.default_rng(5)
    worst_formula, worst_margin, bad = 0.0, math.inf, []
    for trial in range(40):
        w_lo, w_hi = np.sort(rng.uniform(0.0, 72.0, 2))
        for h in range(2, 11):
            eq = PwlModel(np.linspace(w_lo, w_hi, h), 72.0, w_lo, w_hi)
            measured = grid_error(eq, w_lo, w_hi, points)
            target = equidistant_error(w_lo, w_hi, h)
            worst_formula = max(worst_formula, abs(measured - target))
            if abs(measured - target) > 1e-6:
                bad.append(("formula", trial, h, measured, target))
            for _ in range(10):
                inner = np.sort(rng.uniform(w_lo, w_hi, h - 2))
                other = PwlModel(np.concatenate([[w_lo], inner, [w_hi]]), 72.0, w_lo, w_hi)
                margin = grid_error(other, w_lo, w_hi, points) - measured
                worst_margin = min(worst_margin, margin)
                if margin < -1e-9:
                    bad.append(("beaten", trial, h, margin))
    ok = not bad
    report("C4 equidistant breakpoints", ok,
           f"max |grid - formula| {worst_formula:.2e}, "
           f"min (random - equidistant) {worst_margin:.3g}")
    assert ok, bad[:5]


def integer_load_knapsack(rng: np.random.Generator, m: int, conflicts: bool) -> KnapsackProblem:
    """Integral loads a in 1..12 keep the number of distinct subset sums below 73."""
    a = rng.integers(1, 13, m).astype(np.float64)
    sigma = float(rng.uniform(0.5, 2.0))
    b = np.minimum(rng.uniform(0.0, 60.0, m), ((72.0 - a) / sigma) ** 2)
    pairs = {(i, j) for i in range(m) for j in range(i + 1, m) if conflicts and rng.random() < 0.1}
    return KnapsackProblem(rng.uniform(0.0, 1.0, m), a, b, sigma, 72.0, frozenset(pairs))


def test_c05_subset_sum_breakpoints():
    # continuous loads up to m = 8 (up to 256 breakpoints), integral loads for m = 9..12;
    # continuous loads at m >= 9 give ~500-4000 breakpoints, too large for the dense LP
    rng = np.random.default_rng(13)
    bad, total_cuts, sizes = [], 0, []
    for k in range(60):
        if k < 30:
            m = int(rng.integers(1, 9))
            prob = random_knapsack(rng, m, [None, "G", "H", "D"][k % 4],
                                   conflict_prob=0.1 if k % 2 else 0.0)
        else:
            m = int(rng.integers(9, 13))
            prob = integer_load_knapsack(rng, m, bool(k % 2))
        sums = {0.0}
        for x in itertools.product((0, 1), repeat=m):
            w = float(prob.a @ np.array(x, dtype=np.float64))
            if w <= prob.capacity:
                sums.add(w)
        sizes.append(len(sums))
        pwl = PwlModel(np.array(sorted(sums)), prob.capacity, 0.0, prob.capacity)
        res = solve_pwl_bnc(prob, pwl)
        ref = enumerate_knapsack(prob)
        total_cuts += res.cuts
        if res.cuts or res.status != "Optimal" or abs(res.value - ref.value) > 1e-6:
            bad.append((k, m, res.cuts, res.status, res.value, ref.value))
    ok = not bad
    report("C5 subset-sum breakpoints need no cuts", ok,
           f"{60 - len(bad)}/60 optimal with zero cuts ({total_cuts} cuts in total, "
           f"up to {max(sizes)} breakpoints)")
    assert ok, bad[:5]


def test_c06_farley_bounds():
    rng = np.random.default_rng(17)
    instances = [generate(GeneratorConfig(n, alpha, case, seed))
                 for n, case, alpha, seed in [(10, "G", 0.99, 0), (10, "H", 0.9, 1),
                                              (9, "D", 0.6, 2), (10, "D", 0.99, 3)]]
    instances += [random_instance(rng, int(rng.integers(5, 11))) for _ in range(26)]
    worst_f, worst_final, bad, traces = -math.inf, 0.0, [], 0
    for k, inst in enumerate(instances):
        z = full_master_lp(inst)
        v_ld, converged, rep = solve_root(inst, BnpConfig(pricing="exact", colsel=False,
                                                          time_limit=60.0))
        traces += len(rep.farley_trace)
        for _, v_f in rep.farley_trace:
            worst_f = max(worst_f, v_f - z)
            if v_f > z + 1e-7:
                bad.append(("farley", k, v_f, z))
        worst_final = max(worst_final, abs(v_ld - z))
        if not converged or abs(v_ld - z) > 1e-6:
            bad.append(("final", k, v_ld, z, converged))
    ok = not bad
    report("C6 Farley bound", ok,
           f"{len(instances)} instances, {traces} bounds, max (v_F - LP) {worst_f:.2e}, "
           f"max |v_ld - LP| {worst_final:.2e}")
    assert ok, bad[:5]


def test_c07_greedy_ratio():
    runs = oracle_runs()
    worst, bad = 0.0, []
    for r in runs:
        g = len(greedy_min_utilization(r["inst"]))
        worst = max(worst, g / r["opt"])
        if g > math.ceil(8.0 / 3.0 * r["opt"]):
            bad.append((r["cfg"], g, r["opt"]))
    ok = not bad
    report("C7 greedy approximation", ok,
           f"{len(runs) - len(bad)}/{len(runs)} within ceil(8/3 OPT), worst ratio {worst:.3f}")
    assert ok, bad[:5]


def test_c08_set_cover_vs_compact():
    rng = np.random.default_rng(19)
    cfgs = [GeneratorConfig(int(rng.integers(4, 9)), float(rng.choice(ALPHAS)),
                            CASES[k % 3], k) for k in range(15)]
    instances = [generate(c) for c in cfgs]
    instances += [random_instance(rng, int(rng.integers(4, 9))) for _ in range(15)]
    worst, bad, unconverged = math.inf, [], 0
    for k, inst in enumerate(instances):
        z = full_master_lp(inst)
        kel, converged = kelley_compact_relaxation(inst)
        unconverged += not converged
        worst = min(worst, z - kel)
        if z < kel - 1e-5:
            bad.append((k, z, kel))
    ok = not bad
    report("C8 set cover LP dominates the compact relaxation", ok,
           f"{30 - len(bad)}/30, min (set cover - compact) {worst:.4g}, "
           f"{unconverged} Kelley runs hit the iteration cap")
    assert ok, bad[:5]


def test_c09_hybrid_pricing():
    runs = oracle_runs()
    mismatch = [r["cfg"] for r in runs if r["hybrid"][0].objective != r["exact"][0].objective
                or r["hybrid"][0].status != "Optimal"]
    # the share is undefined when no column was priced; such runs do not count
    # as below 100%
    below = sum(r["hybrid"][0].columns > 0 and r["hybrid"][0].exact_pct < 100.0 for r in runs)
    priced = sum(r["hybrid"][0].columns > 0 for r in runs)
    # diagnostic only: dense random instances where pricing has work to do
    rng = np.random.default_rng(99)
    d_priced = d_below = 0
    for _ in range(30):
        rep, _ = solve_bnp(random_instance(rng, int(rng.integers(6, 13))),
                           BnpConfig(time_limit=60.0, pricing="hybrid"))
        d_priced += rep.columns > 0
        d_below += rep.columns > 0 and rep.exact_pct < 100.0
    ok = not mismatch and 2 * below >= len(runs)
    report("C9 hybrid pricing", ok,
           f"{len(runs) - len(mismatch)}/{len(runs)} identical objectives; exact share "
           f"< 100% on {below}/{len(runs)} ({priced} priced any column); "
           f"dense random diagnostic: {d_below}/{d_priced} priced runs below 100%")
    assert ok, (mismatch[:5], below, priced)


def test_c10_desk_scale_suite(tmp_path):
    jobs = int(os.environ.get("SMBP_ACCEPT_JOBS", "1"))
    suite = tmp_path / "suite"
    paths = generate_suite(suite, 40, ALPHAS, CASES, range(6))
    assert len(paths) == 108
    csv_path = tmp_path / "n40.csv"
    t0 = time.perf_counter()
    rows = run_benchmark(suite, BnpConfig(time_limit=120.0), jobs, csv_path)
    elapsed = time.perf_counter() - t0
    errors = [r["instance"] for r in rows if r.get("_error")]
    bad_bound = []
    for r in rows:
        if r.get("_error"):
            continue
        rep = r["_report"]
        if rep["dual_bound"] > rep["objective"]:
            bad_bound.append(r["instance"])
        verify_partition(read_instance(suite / f"{r['instance']}.json"), r["_bins"])
    again = tmp_path / "again_aggregate.csv"
    write_aggregate(aggregate(read_rows(csv_path)), again)
    identical = again.read_bytes() == aggregate_path(csv_path).read_bytes()
    solved = sum(r["solved"] for r in rows)
    ok = len(rows) == 108 and not errors and not bad_bound and identical
    report("C10 desk-scale suite", ok,
           f"{len(rows)} instances in {elapsed / 60:.1f} min with {jobs} job(s), "
           f"{solved} solved, {len(errors)} errors, {len(bad_bound)} dual > primal, "
           f"aggregate round trip {'identical' if identical else 'DIFFERS'}")
    assert ok, (errors[:5], bad_bound[:5])

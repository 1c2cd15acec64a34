"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on the same inputs by both backends; outputs are checked
for equality before timings are reported.
"""
import argparse
import time

import numpy as np

from smbp import kernels
from smbp.generator import GeneratorConfig, generate
from smbp.knapsack import random_knapsack


def _cases(rng):
    inst12 = generate(GeneratorConfig(12, 0.9, "G", 1))
    inst200 = generate(GeneratorConfig(200, 0.9, "H", 2))
    kp = random_knapsack(rng, 16, "D", conflict_prob=0.1)
    kp40 = random_knapsack(rng, 40, "G", conflict_prob=0.05)
    return {
        "subset_feasible n=12": lambda k: k.subset_feasible(inst12.a, inst12.b, inst12.sigma,
                                                            inst12.capacity),
        "min_bins_dp n=12": lambda k: k.min_bins_dp(
            k.subset_feasible(inst12.a, inst12.b, inst12.sigma, inst12.capacity), 12),
        "greedy_min_util n=200": lambda k: k.greedy_min_util(inst200.a, inst200.b,
                                                             inst200.sigma, inst200.capacity),
        "knapsack_enum m=16": lambda k: k.knapsack_enum(kp.a, kp.b, kp.profits, kp.sigma,
                                                        kp.capacity, kp.conflict_matrix, 1e-9),
        "fixing_greedy m=40": lambda k: k.fixing_greedy(kp40.a, kp40.b, kp40.profits,
                                                        kp40.sigma, kp40.capacity,
                                                        kp40.conflict_matrix),
    }


def _same(x, y) -> bool:
    if isinstance(x, tuple):
        return len(x) == len(y) and all(_same(u, v) for u, v in zip(x, y))
    if isinstance(x, list):
        return _same(tuple(x), tuple(y))
    x, y = np.asarray(x), np.asarray(y)
    if x.dtype.kind == "f":
        # summation order differs between backends
        return bool(np.allclose(x, y, rtol=1e-12, atol=1e-12))
    return bool(np.array_equal(x, y))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':24s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup")
    for label, fn in cases.items():
        times, outs = {}, {}
        for name, mod in backends.items():
            best = float("inf")
            for _ in range(max(args.repeat, 1)):
                t0 = time.perf_counter()
                outs[name] = fn(mod)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        if len(outs) == 2 and not _same(outs["python"], outs["cython"]):
            raise SystemExit(f"{label}: backends disagree")
        speed = (f"{times['python'] / times['cython']:10.1f}x" if "cython" in times else "")
        print(f"{label:24s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in backends) + speed)


if __name__ == "__main__":
    main()

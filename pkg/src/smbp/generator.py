"""Synthetic cloud-packing benchmark instances.

Nominal sizes come from a histogram of job sizes; the load coefficients are
derived from a truncated Gaussian per item under one of three chance-constraint
approximations (Gaussian, Hoeffding, distributionally robust).  Randomness is
drawn from numpy's PCG64 seeded with the instance seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .instance import SmbpInstance, write_instance

SIZE_QUANTILES = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 72.0)
SIZE_WEIGHTS = (36.3, 13.8, 21.3, 23.1, 3.5, 1.9, 0.1)
# [0,1], [1,2], [2,4], ... [32,72]
SIZE_EDGES = (0.0,) + SIZE_QUANTILES

ALPHAS = (0.6, 0.7, 0.8, 0.9, 0.95, 0.99)
CASES = ("G", "H", "D")
_CASE_NAMES = {"gaussian": "G", "hoeffding": "H", "distrobust": "D", "dist_robust": "D"}


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    alpha: float
    case: str
    seed: int
    capacity: float = 72.0

    def __post_init__(self):
        case = _CASE_NAMES.get(self.case.lower(), self.case.upper())
        if case not in CASES:
            raise ValueError(f"unknown case {self.case!r}; expected one of G, H, D")
        object.__setattr__(self, "case", case)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be positive")


def sample_nominal_sizes(config: GeneratorConfig, rng: np.random.Generator) -> np.ndarray:
    p = np.asarray(SIZE_WEIGHTS) / sum(SIZE_WEIGHTS)
    k = rng.choice(len(p), size=config.n, p=p)
    lo = np.asarray(SIZE_EDGES[:-1])[k]
    hi = np.asarray(SIZE_EDGES[1:])[k]
    return rng.uniform(lo, hi)


def _phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _Phi(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def truncnorm_moments(loc: float, scale: float, lo: float, hi: float) -> tuple[float, float]:
    """Mean and standard deviation of N(loc, scale^2) truncated to [lo, hi]."""
    al = (lo - loc) / scale
    be = (hi - loc) / scale
    Z = _Phi(be) - _Phi(al)
    pa, pb = _phi(al), _phi(be)
    mean = loc + scale * (pa - pb) / Z
    var = scale ** 2 * (1.0 + (al * pa - be * pb) / Z - ((pa - pb) / Z) ** 2)
    return mean, math.sqrt(max(var, 0.0))


def sample_truncated_gaussian_params(n: int, rng: np.random.Generator) -> dict:
    A_lo = rng.uniform(0.3, 0.6, size=n)
    A_hi = rng.uniform(0.7, 1.0, size=n)
    s = rng.uniform(0.1, 0.5, size=n)
    mu = np.empty(n)
    sd = np.empty(n)
    for i in range(n):
        # location of the untruncated Gaussian: interval midpoint
        mu[i], sd[i] = truncnorm_moments(0.5 * (A_lo[i] + A_hi[i]), s[i], A_lo[i], A_hi[i])
    return {"A_lo": A_lo, "A_hi": A_hi, "s": s, "mu_prime": mu, "sigma_prime": sd}


def risk_multiplier(case: str, alpha: float) -> float:
    if case == "G":
        return NormalDist().inv_cdf(alpha)
    if case == "H":
        return math.sqrt(-0.5 * math.log(1.0 - alpha))
    if case == "D":
        return math.sqrt(alpha / (1.0 - alpha))
    raise ValueError(f"unknown case {case!r}")


def rescale_to_fit(instance: SmbpInstance) -> SmbpInstance:
    """Shrink every oversized item onto the capacity, keeping a : sigma*sqrt(b)."""
    a = instance.a.copy()
    b = instance.b.copy()
    usage = a + instance.sigma * np.sqrt(b)
    big = usage > instance.capacity
    t = instance.capacity / usage[big]
    a[big] *= t
    b[big] *= t * t
    return SmbpInstance(a, b, instance.sigma, instance.capacity, dict(instance.meta))


def build_case(config: GeneratorConfig, mu: np.ndarray, params: dict) -> SmbpInstance:
    sigma = risk_multiplier(config.case, config.alpha)
    a = params["mu_prime"] * mu
    if config.case == "H":
        b = ((params["A_hi"] - params["A_lo"]) * mu) ** 2
    else:
        b = (params["sigma_prime"] * mu) ** 2
    meta = {"case": config.case, "alpha": config.alpha, "seed": config.seed}
    return rescale_to_fit(SmbpInstance(a, b, sigma, config.capacity, meta))


def generate(config: GeneratorConfig) -> SmbpInstance:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    mu = sample_nominal_sizes(config, rng)
    params = sample_truncated_gaussian_params(config.n, rng)
    return build_case(config, mu, params).validate()


def instance_name(config: GeneratorConfig) -> str:
    return f"{config.case}_a{config.alpha:g}_s{config.seed}_n{config.n}"


def generate_suite(out_dir, n: int, alphas=ALPHAS, cases=CASES, seeds=range(6),
                   capacity: float = 72.0) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for case in cases:
        for alpha in alphas:
            for seed in seeds:
                cfg = GeneratorConfig(n, alpha, case, seed, capacity)
                path = out_dir / f"{instance_name(cfg)}.json"
                write_instance(generate(cfg), path)
                paths.append(path)
    return paths

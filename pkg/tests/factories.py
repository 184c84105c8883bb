"""Random generator configurations spanning every child-count law."""

import numpy as np

from mdgraph.generator import (
    GeneratorConfig,
    PerType,
    TransitionMatrix,
    TruncatedPoisson,
    TruncatedPowerLaw,
    TypeDistribution,
    UniformRange,
)


def _random_law(rng, kind):
    if kind == "poisson":
        return TruncatedPoisson(float(rng.uniform(1.0, 6.0)))
    if kind == "uniform":
        lo = int(rng.integers(2, 5))
        return UniformRange(lo, lo + int(rng.integers(0, 5)))
    k_min = int(rng.integers(2, 6))
    k_max = None if rng.random() < 0.5 else k_min + int(rng.integers(0, 20))
    return TruncatedPowerLaw(float(rng.uniform(0.0, 2.5)), k_min, k_max)


def _random_row(rng, forbidden):
    w = rng.dirichlet(np.ones(3))
    if forbidden is not None:
        w[forbidden] = 0.0
    w = w / w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return [float(x) for x in w]


def random_configs(count, seed=0):
    rng = np.random.default_rng(seed)
    kinds = ["poisson", "uniform", "power_law", "per_type"]
    configs = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        if kind == "per_type":
            law = PerType(*(_random_law(rng, k) for k in rng.choice(kinds[:3], size=3)))
        else:
            law = _random_law(rng, kind)
        pi0 = _random_row(rng, None)
        rows = [_random_row(rng, 0), _random_row(rng, 1), _random_row(rng, None)]
        configs.append(
            GeneratorConfig(
                n=int(rng.integers(1, 80)),
                pi0=TypeDistribution.of(pi0),
                transition=TransitionMatrix.of(rows),
                child_law=law,
                gamma=(1.0, 1.5)[i % 2],
                prime_min_vertices=int(rng.integers(4, 8)),
            )
        )
    return configs

"""Monte-Carlo checks of the generator's closed-form properties.

Each check returns a :class:`CheckReport` holding its inputs, the empirical
estimates with standard errors, the theoretical value or bound and the
verdict.  Equalities pass within 3 standard errors (or a stated relative
tolerance), inequalities are one-sided with 3-SE slack.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .generator import (
    PRIME,
    SERIES,
    GeneratorConfig,
    PerType,
    TransitionMatrix,
    TypeDistribution,
    UniformRange,
    generate,
    polya_allocate,
    reference_config,
    type_probabilities,
    TYPES,
    _window,
)
from .graph import degrees, metrics
from .samplers import derive_rng, list_primes

SLACK_SE = 3.0


@dataclass
class CheckReport:
    claim: str
    inputs: dict
    empirical: dict
    standard_errors: dict
    theoretical: dict
    tolerance: str
    verdict: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def summary_line(self) -> str:
        status = "PASS" if self.verdict else "FAIL"
        emp = ", ".join(f"{k}={_fmt(v)}" for k, v in self.empirical.items())
        theo = ", ".join(f"{k}={_fmt(v)}" for k, v in self.theoretical.items())
        return f"[{status}] {self.claim}: empirical {emp} | theory {theo} | {self.tolerance}"


def _fmt(v) -> str:
    return f"{v:.4g}" if isinstance(v, float) else str(v)


def _mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return float(arr.mean()) if arr.size else float("nan"), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


# ---------------------------------------------------------------------------
# Polya urn moments
# ---------------------------------------------------------------------------

def polya_closed_forms(n: int, k: int) -> dict:
    """Moments of the urn allocation in the n-draw parametrisation.

    ``cross_moment`` is E(n_k n_l) for k != l; the ratio of it to the
    variance is :func:`r_ratio`.
    """
    return {
        "mean": n / k,
        "variance": n * (k + n) * (k - 1) / (k**2 * (k + 1)),
        "cross_moment": n * (n - 1) / (k * (k + 1)),
    }


def polya_exact_moments(n: int, k: int) -> dict:
    """Exact moments of child sizes: one seed vertex each plus a
    Dirichlet-multinomial split of the n - k free vertices."""
    free = n - k
    var = free * (k - 1) * (free + k) / (k**2 * (k + 1))
    cross_free = free * (free - 1) / (k * (k + 1))
    return {
        "mean": n / k,
        "variance": var,
        "covariance": -free * (free + k) / (k**2 * (k + 1)),
        "cross_moment": cross_free + 2 * free / k + 1,
    }


def check_polya_moments(
    n: int = 1000, k: int = 10, trials: int = 10_000, seed: int = 0,
    mean_rtol: float = 0.01, moment_rtol: float = 0.05,
) -> CheckReport:
    """Child-size mean, variance and cross moment against their closed forms."""
    rng = np.random.default_rng(seed)
    sizes = np.array([polya_allocate(n, k, 1.0, rng) for _ in range(trials)], dtype=float)
    first, second = sizes[:, 0], sizes[:, 1]
    mean = float(first.mean())
    var = float(first.var(ddof=1))
    prod = first * second
    cross = float(prod.mean())
    cov = float(np.cov(first, second)[0, 1])
    se = {
        "mean": float(first.std(ddof=1) / math.sqrt(trials)),
        "variance": float(np.std((first - first.mean()) ** 2, ddof=1) / math.sqrt(trials)),
        "cross_moment": float(prod.std(ddof=1) / math.sqrt(trials)),
    }
    closed = polya_closed_forms(n, k)
    exact = polya_exact_moments(n, k)

    def rel_ok(emp, theo, rtol):
        return abs(emp - theo) <= rtol * abs(theo) if theo else emp == 0

    def se_ok(emp, theo, s):
        return abs(emp - theo) <= SLACK_SE * s + 1e-12

    verdict = (
        rel_ok(mean, closed["mean"], mean_rtol)
        and rel_ok(var, closed["variance"], moment_rtol)
        and rel_ok(cross, closed["cross_moment"], moment_rtol)
        and se_ok(mean, exact["mean"], se["mean"])
        and se_ok(var, exact["variance"], se["variance"])
        and se_ok(cross, exact["cross_moment"], se["cross_moment"])
    )
    return CheckReport(
        claim="polya-moments",
        inputs={"n": n, "k": k, "trials": trials, "seed": seed, "gamma": 1.0},
        empirical={"mean": mean, "variance": var, "cross_moment": cross, "covariance": cov},
        standard_errors=se,
        theoretical={
            "mean": closed["mean"],
            "variance": closed["variance"],
            "cross_moment": closed["cross_moment"],
            "exact_variance": exact["variance"],
            "exact_cross_moment": exact["cross_moment"],
            "exact_covariance": exact["covariance"],
        },
        tolerance=f"mean rtol {mean_rtol}, variance/cross rtol {moment_rtol}; exact forms within {SLACK_SE} SE",
        verdict=bool(verdict),
        notes=[
            "cross_moment is E(n_k n_l); the true covariance of child sizes is negative",
        ],
    )


def r_ratio(n: float, k: float) -> float:
    """Cross-moment to variance ratio of child sizes, (n-1)K / ((K-1)(K+n))."""
    if k < 2:
        raise ValueError("r(n, K) needs K >= 2")
    return (n - 1) * k / ((k - 1) * (k + n))


# ---------------------------------------------------------------------------
# Diameter lemma
# ---------------------------------------------------------------------------

def check_diameter_bound(config: GeneratorConfig, samples: int = 200, seed: int = 0) -> CheckReport:
    """Mean diameter against 2 P(series) + P(prime) E(K) at the root."""
    p_series, p_parallel, p_prime = type_probabilities(None, config.n, config)
    if p_parallel > 0:
        raise ValueError("diameter bound applies to configs without parallel roots")
    diams, ks = [], []
    disconnected = 0
    for i in range(samples):
        s = generate(config, derive_rng(seed, i))
        m = metrics(s.graph)
        if not m.connected:
            disconnected += 1
            continue
        diams.append(m.diameter)
        if s.tree.kind == PRIME:
            ks.append(len(s.tree.children))
    mean_diam, se = _mean_se(diams)
    mean_k = float(np.mean(ks)) if ks else 0.0
    bound = 2 * p_series + p_prime * mean_k
    notes = [f"{disconnected} disconnected samples excluded"] if disconnected else []
    return CheckReport(
        claim="diameter-bound",
        inputs={"config": config.to_dict(), "samples": samples, "seed": seed},
        empirical={"mean_diameter": mean_diam, "mean_root_k_prime": mean_k, "max_diameter": max(diams, default=0)},
        standard_errors={"mean_diameter": se},
        theoretical={"bound": bound, "p_series": p_series, "p_prime": p_prime},
        tolerance=f"one-sided, mean - {SLACK_SE} SE <= bound",
        verdict=bool(mean_diam - SLACK_SE * se <= bound),
        notes=notes,
    )


def series_only_config(n: int = 60) -> GeneratorConfig:
    return reference_config(n=n).with_(pi0=[1.0, 0.0, 0.0])


def prime_fixed_k_config(n: int = 60, k: int = 5) -> GeneratorConfig:
    base = reference_config(n=n)
    law = PerType(prime=UniformRange(k, k), series=UniformRange(2, 2), parallel=UniformRange(2, 6))
    return base.with_(child_law=law, prime_min_vertices=max(k, 4))


def mixed_root_config(n: int = 100, alpha: float = 0.08) -> GeneratorConfig:
    return reference_config(alpha=alpha, n=n).with_(pi0=[0.3, 0.0, 0.7])


# ---------------------------------------------------------------------------
# Degree lemma
# ---------------------------------------------------------------------------

def _first_level_neighbor_counts(tree) -> list[int]:
    """|N_1(v)| for every vertex, indexed by vertex."""
    counts = [0] * tree.size
    masks = tree.outer_graph().adj_masks
    for i, c in enumerate(tree.children):
        for v in c.vertices:
            counts[v] = masks[i].bit_count()
    return counts


def check_degree_bounds(
    config: GeneratorConfig, samples: int = 200, seed: int = 0, thresholds: list[int] | None = None
) -> CheckReport:
    """Mean-degree first-level bound and degree tail bound, both sides simulated.

    Mean: E dg(v) >= sum_k (n/k) E(|N_1(v)| | k) P(k), the right side
    averaged per sample as (n/k) times the mean quotient degree.
    Tail: for each threshold m, P(dg(v) >= m) >= P(K_1 >= m, |N_1(v)| = m),
    both estimated over (sample, vertex) pairs.
    """
    if type_probabilities(None, config.n, config)[1] > 0:
        raise ValueError("degree bounds apply to configs without parallel roots")
    n = config.n
    if thresholds is None:
        thresholds = sorted({m for m in (2, 4, 8, 16, 32, 64) if m < n})
    lhs_mean, rhs_mean = [], []
    tail_lhs = {m: [] for m in thresholds}
    tail_rhs = {m: [] for m in thresholds}
    for i in range(samples):
        s = generate(config, derive_rng(seed, i))
        degs = degrees(s.graph)
        lhs_mean.append(sum(degs) / n)
        if s.tree.is_leaf:
            rhs_mean.append(0.0)
            n1 = [0] * n
            k1 = 1
        else:
            k1 = len(s.tree.children)
            n1 = _first_level_neighbor_counts(s.tree)
            q_mean_deg = 2 * s.tree.outer_graph().num_edges / k1
            rhs_mean.append(n / k1 * q_mean_deg)
        for m in thresholds:
            tail_lhs[m].append(sum(d >= m for d in degs) / n)
            tail_rhs[m].append(sum(c == m for c in n1) / n if k1 >= m else 0.0)
    lm, lse = _mean_se(lhs_mean)
    rm, rse = _mean_se(rhs_mean)
    slack = SLACK_SE * math.hypot(lse, rse)
    mean_ok = lm + slack >= rm
    empirical = {"mean_degree": lm}
    ses = {"mean_degree": lse, "first_level_bound": rse}
    theoretical = {"first_level_bound": rm}
    tail_ok = True
    for m in thresholds:
        a, ase = _mean_se(tail_lhs[m])
        b, bse = _mean_se(tail_rhs[m])
        empirical[f"P(dg>={m})"] = a
        theoretical[f"tail_bound_m{m}"] = b
        ses[f"P(dg>={m})"] = ase
        tail_ok = tail_ok and a + SLACK_SE * math.hypot(ase, bse) >= b
    return CheckReport(
        claim="degree-bounds",
        inputs={"config": config.to_dict(), "samples": samples, "seed": seed, "thresholds": thresholds},
        empirical=empirical,
        standard_errors=ses,
        theoretical=theoretical,
        tolerance=f"one-sided with {SLACK_SE}-SE slack",
        verdict=bool(mean_ok and tail_ok),
        notes=[f"mean bound {'holds' if mean_ok else 'violated'}; tail bound {'holds' if tail_ok else 'violated'}"],
    )


# ---------------------------------------------------------------------------
# Exact expected degree on tiny instances
# ---------------------------------------------------------------------------

def compositions(n: int, k: int):
    """All ordered ways to write n as k positive parts."""
    for cuts in combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


def urn_composition_probability(sizes: tuple[int, ...], gamma: float = 1.0) -> float:
    """Probability the urn started from one vertex per child ends at ``sizes``."""
    k = len(sizes)

    @lru_cache(maxsize=None)
    def prob(state: tuple[int, ...]) -> float:
        if state == (1,) * k:
            return 1.0
        total = 0.0
        for i in range(k):
            if state[i] > 1:
                prev = state[:i] + (state[i] - 1,) + state[i + 1:]
                w = [s**gamma for s in prev]
                total += prob(prev) * w[i] / sum(w)
        return total

    return prob(tuple(sizes))


def _prime_edge_fraction(k: int) -> float:
    primes = list_primes(k)
    return sum(p.num_edges for p in primes) / (len(primes) * k * (k - 1) / 2)


def exact_expected_edges(config: GeneratorConfig) -> float:
    """E(|E|) by enumerating child counts, urn outcomes and types (small n)."""
    law = config.child_law
    cap = config.prime_quotient_cap

    @lru_cache(maxsize=None)
    def edges(size: int, parent: str | None, level: int) -> float:
        if size == 1:
            return 0.0
        total = 0.0
        for t, pt in zip(TYPES, type_probabilities(parent, size, config, level)):
            if pt == 0:
                continue
            lo, hi = _window(law, t, size, cap)
            if lo > hi:
                lo = hi = size
            ks = np.arange(lo, hi + 1)
            w = law.pmf(t, ks)
            for k, pk in zip(ks.tolist(), (w / w.sum()).tolist()):
                frac = {SERIES: 1.0, PRIME: None}.get(t, 0.0)
                if frac is None:
                    frac = _prime_edge_fraction(k)
                acc = 0.0
                for comp in compositions(size, k):
                    pc = urn_composition_probability(comp, config.gamma)
                    outer = frac * (sum(comp) ** 2 - sum(c * c for c in comp)) / 2
                    inner = sum(edges(c, t, level + 1) for c in comp)
                    acc += pc * (outer + inner)
                total += pt * pk * acc
        return total

    return edges(config.n, None, 0)


def micro_config() -> GeneratorConfig:
    """n = 8, prime root on 4 children (a P4), alternating series/parallel below."""
    return GeneratorConfig(
        n=8,
        pi0=TypeDistribution(0.0, 0.0, 1.0),
        transition=TransitionMatrix.of([[0, 1, 0], [1, 0, 0], [0.5, 0.5, 0]]),
        child_law=PerType(prime=UniformRange(4, 4), series=UniformRange(2, 3), parallel=UniformRange(2, 3)),
        prime_min_vertices=4,
    )


def check_degree_exact(config: GeneratorConfig | None = None, samples: int = 4000, seed: int = 0) -> CheckReport:
    """Monte-Carlo mean degree against its exact enumerated expectation."""
    config = config or micro_config()
    n = config.n
    exact = 2 * exact_expected_edges(config) / n
    values = [sum(degrees(generate(config, derive_rng(seed, i)).graph)) / n for i in range(samples)]
    mean, se = _mean_se(values)
    return CheckReport(
        claim="degree-exact-micro",
        inputs={"config": config.to_dict(), "samples": samples, "seed": seed},
        empirical={"mean_degree": mean},
        standard_errors={"mean_degree": se},
        theoretical={"exact_mean_degree": exact},
        tolerance=f"two-sided, within {SLACK_SE} SE",
        verdict=bool(abs(mean - exact) <= SLACK_SE * se),
    )


def check_r_ratio(n: int = 100, k: int = 10, trials: int = 20_000, seed: int = 0, rtol: float = 0.05) -> CheckReport:
    """Cross-moment/variance ratio of the urn counts against r(., K).

    The formula describes counts of balls added to an urn holding one ball
    per colour, i.e. child sizes minus the seed vertex, with n - k draws.
    The ratio on raw child sizes is reported alongside.
    """
    rng = np.random.default_rng(seed)
    sizes = np.array([polya_allocate(n, k, 1.0, rng) for _ in range(trials)], dtype=float)
    added = sizes - 1
    ratio = float((added[:, 0] * added[:, 1]).mean() / added[:, 0].var(ddof=1))
    raw_ratio = float((sizes[:, 0] * sizes[:, 1]).mean() / sizes[:, 0].var(ddof=1))
    theo = r_ratio(n - k, k)
    return CheckReport(
        claim="r-ratio",
        inputs={"n": n, "k": k, "trials": trials, "seed": seed},
        empirical={"ratio_added": ratio, "ratio_sizes": raw_ratio},
        standard_errors={},
        theoretical={"r(n-k,K)": theo, "r(n,K)": r_ratio(n, k)},
        tolerance=f"relative {rtol} between ratio_added and r(n-k, K)",
        verdict=bool(abs(ratio - theo) <= rtol * theo),
    )


CLAIMS = {
    "polya-moments": lambda seed: check_polya_moments(seed=seed),
    "diameter-series": lambda seed: check_diameter_bound(series_only_config(), 200, seed),
    "diameter-prime-fixed": lambda seed: check_diameter_bound(prime_fixed_k_config(), 200, seed),
    "diameter-mix": lambda seed: check_diameter_bound(mixed_root_config(), 200, seed),
    "degree-bounds": lambda seed: check_degree_bounds(reference_config(n=100), 200, seed),
    "degree-exact-micro": lambda seed: check_degree_exact(seed=seed),
    "r-ratio": lambda seed: check_r_ratio(seed=seed),
}


def run_checks(claims: list[str] | None = None, seed: int = 0) -> list[CheckReport]:
    names = list(CLAIMS) if claims is None else claims
    unknown = [c for c in names if c not in CLAIMS]
    if unknown:
        raise KeyError(f"unknown claim(s): {', '.join(unknown)}")
    reports = []
    for name in names:
        report = CLAIMS[name](seed)
        report.claim = name
        reports.append(report)
    return reports

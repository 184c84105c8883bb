"""One test per acceptance criterion; each records a PASS/FAIL line that is
printed in the "acceptance criteria" section of the pytest summary."""

import csv
import math
import time
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from mdgraph.checks import (
    check_diameter_bound,
    check_polya_moments,
    mixed_root_config,
    polya_closed_forms,
    prime_fixed_k_config,
    series_only_config,
)
from mdgraph.experiments import ExperimentSpec, run_experiment
from mdgraph.generator import degree_via_tree, generate
from mdgraph.graph import degrees
from mdgraph.md import LEAF, PARALLEL, PRIME, expand, md_stats, modular_decomposition
from mdgraph.samplers import (
    ba_graph,
    derive_rng,
    enumerate_primes,
    er_graph,
    list_primes,
    sample_prime_uniform,
)

from factories import random_configs

SEED = 1


def test_c01_prime_enumeration(acceptance):
    start = time.perf_counter()
    counts = [enumerate_primes(m) for m in (4, 5, 6)]
    elapsed = time.perf_counter() - start
    acceptance("C1 prime enumeration", counts == [12, 192, 10800] and elapsed < 60,
               f"counts={counts} time={elapsed:.1f}s")


def test_c02_zachary(acceptance, zachary):
    tree = modular_decomposition(zachary)
    s = md_stats(tree)
    internal = [n for n in tree.iter_nodes() if not n.is_leaf]
    parallels = {frozenset(v + 1 for v in n.vertices) for n in internal if n.kind == PARALLEL}
    ok = (
        tree.kind == PRIME
        and len(internal) == 3
        and (s.n_prime, s.n_parallel) == (1, 2)
        and parallels == {frozenset({15, 16, 19, 21, 23}), frozenset({18, 22})}
        and s.largest_prime == 29
        and math.isclose(s.density_prime, 1 / 3)
        and math.isclose(s.density_parallel, 2 / 3)
    )
    acceptance("C2 Zachary decomposition", ok,
               f"root={tree.kind} internal={len(internal)} largest_prime={s.largest_prime} "
               f"densities=({s.density_prime:.3f}, {s.density_series:.3f}, {s.density_parallel:.3f})")


def test_c03_decompose_expand_identity(acceptance):
    start = time.perf_counter()
    grid = [(n, p) for n in (10, 30, 50) for p in (0.05, 0.1, 0.5)]
    failures = 0
    for i in range(200):
        n, p = grid[i % len(grid)]
        g = er_graph(n, p, derive_rng(SEED, i))
        if expand(modular_decomposition(g)) != g:
            failures += 1
    elapsed = time.perf_counter() - start
    acceptance("C3 expand(decompose(g)) == g", failures == 0 and elapsed < 30,
               f"200 ER graphs, failures={failures} time={elapsed:.1f}s")


@pytest.fixture(scope="module")
def generated_samples():
    configs = random_configs(100, seed=SEED)
    start = time.perf_counter()
    samples = [generate(cfg, derive_rng(SEED, i)) for i, cfg in enumerate(configs)]
    return configs, samples, time.perf_counter() - start


def test_c04_generator_roundtrip(acceptance, generated_samples):
    configs, samples, gen_time = generated_samples
    start = time.perf_counter()
    mismatches = sum(modular_decomposition(expand(s.tree)) != s.tree for s in samples)
    elapsed = gen_time + time.perf_counter() - start
    laws = Counter(cfg.child_law.to_dict()["kind"] for cfg in configs)
    gammas = sorted({cfg.gamma for cfg in configs})
    acceptance("C4 generator roundtrip", mismatches == 0 and elapsed < 60 and len(laws) == 4 and gammas == [1.0, 1.5],
               f"configs=100 laws={dict(laws)} gammas={gammas} mismatches={mismatches} time={elapsed:.1f}s")


def test_c05_tree_degree(acceptance, generated_samples):
    _, samples, _ = generated_samples
    bad = 0
    checked = 0
    for s in samples:
        degs = degrees(s.graph)
        for v in range(s.graph.n):
            checked += 1
            bad += degree_via_tree(s, v) != degs[v]
    acceptance("C5 degree_via_tree == degree", bad == 0, f"vertices={checked} mismatches={bad}")


@pytest.fixture(scope="module")
def er_table():
    spec = ExperimentSpec("er-sweep", {"n": 50, "ps": [0.5, 0.01, 0.05]}, replicates=50, seed=SEED)
    return run_experiment(spec)


def _group_rows(result, group):
    return [r for r in result.rows if r["group"] == group]


def test_c06a_er_dense_single_prime(acceptance, er_table):
    rows = _group_rows(er_table, "p=0.5")
    single = [r for r in rows if r["root_kind"] == PRIME and r["n_internal"] == 1]
    frac = len(single) / len(rows)
    all_50 = all(r["largest_prime"] == 50 for r in single)
    acceptance("C6 ER p=0.5 single prime root", frac >= 0.9 and all_50,
               f"fraction={frac:.2f} largest_prime=50 in all: {all_50}")


def test_c06b_er_sparse_largest_prime(acceptance, er_table):
    rows = _group_rows(er_table, "p=0.01")
    with_prime = [r["largest_prime"] for r in rows if r["n_prime"] > 0]
    mean = float(np.mean(with_prime))
    acceptance("C6 ER p=0.01 mean largest prime in [4, 7]", 4.0 <= mean <= 7.0,
               f"mean={mean:.2f} over {len(with_prime)}/{len(rows)} replicates with a prime node")


def test_c06c_er_sparse_parallel_density(acceptance, er_table):
    rows = _group_rows(er_table, "p=0.01")
    mean = float(np.mean([r["density_parallel"] for r in rows]))
    acceptance("C6 ER p=0.01 parallel density in [0.7, 0.95]", 0.7 <= mean <= 0.95, f"mean={mean:.3f}")


def test_c06d_er_mid_largest_prime(acceptance, er_table):
    rows = _group_rows(er_table, "p=0.05")
    mean = float(np.mean([r["largest_prime"] for r in rows]))
    acceptance("C6 ER p=0.05 mean largest prime in [35, 50]", 35 <= mean <= 50, f"mean={mean:.2f}")


def test_c07_ba(acceptance):
    hits = []
    largest = []
    for i in range(50):
        tree = modular_decomposition(ba_graph(50, 1, derive_rng(SEED, i)))
        s = md_stats(tree)
        largest.append(s.largest_prime)
        if tree.kind == PRIME and all(c.kind in (PARALLEL, LEAF) for c in tree.children):
            hits.append(s.depth)
    frac = len(hits) / 50
    mean_largest = float(np.mean(largest))
    ok = frac >= 0.8 and all(d == 3 for d in hits) and 30 <= mean_largest <= 45
    acceptance("C7 BA m=1 structure", ok,
               f"prime root over parallel/leaf children={frac:.2f} depths={sorted(Counter(hits).items())} "
               f"mean largest prime={mean_largest:.1f}")


@pytest.fixture(scope="module")
def generator_tables(tmp_path_factory):
    out = {}
    for alpha in (0.08, 1.0):
        out_dir = tmp_path_factory.mktemp(f"alpha{alpha}")
        spec = ExperimentSpec("md-generator", {"n": 100, "alpha": alpha}, replicates=50, seed=SEED, out_dir=str(out_dir))
        out[alpha] = (run_experiment(spec), out_dir)
    return out


@pytest.mark.parametrize("alpha, windows", [
    (0.08, {"edge_density": (0.45, 0.15), "diameter": (2.1, 0.6),
            "global_clustering": (0.47, 0.15), "mean_local_clustering": (0.52, 0.15)}),
    (1.0, {"edge_density": (0.40, 0.15), "diameter": (2.3, 0.7)}),
])
def test_c08_generator_metrics(acceptance, generator_tables, alpha, windows):
    result, _ = generator_tables[alpha]
    summary = result.summary_for(f"alpha={alpha}")
    parts, ok = [], True
    for stat, (centre, half) in windows.items():
        mean = summary[stat]["mean"]
        ok &= abs(mean - centre) <= half
        parts.append(f"{stat}={mean:.3f} (target {centre}±{half})")
    acceptance(f"C8 generator metrics alpha={alpha}", ok, "; ".join(parts))


def test_c09_polya_moments(acceptance):
    report = check_polya_moments(n=1000, k=10, trials=10_000, seed=SEED)
    forms = polya_closed_forms(1000, 10)
    emp = report.empirical
    rel = {key: abs(emp[key] - forms[key]) / forms[key] for key in ("mean", "variance", "cross_moment")}
    ok = rel["mean"] <= 0.01 and rel["variance"] <= 0.05 and rel["cross_moment"] <= 0.05
    acceptance("C9 Polya moments", ok,
               "relative errors " + ", ".join(f"{k}={v:.4f}" for k, v in rel.items()))


@pytest.mark.parametrize("name, make", [
    ("series-only", series_only_config),
    ("prime fixed K", prime_fixed_k_config),
    ("mixed root", mixed_root_config),
])
def test_c10_diameter_bound(acceptance, name, make):
    report = check_diameter_bound(make(), samples=200, seed=SEED)
    acceptance(f"C10 diameter bound ({name})", report.verdict,
               f"mean={report.empirical['mean_diameter']:.3f} se={report.standard_errors['mean_diameter']:.3f} "
               f"bound={report.theoretical['bound']:.3f}")


def test_c11_prime_sampler_uniform(acceptance):
    primes = [g.edges for g in list_primes(4)]
    rng = derive_rng(SEED, 11)
    counts = Counter(sample_prime_uniform(4, rng).edges for _ in range(10_000))
    observed = [counts[e] for e in primes]
    p = chisquare(observed).pvalue
    acceptance("C11 uniform prime sampler (m=4)", sum(observed) == 10_000 and p > 0.01,
               f"buckets={len(primes)} chi-square p={p:.3f}")


def test_c12_heavy_tail_tables(acceptance, generator_tables):
    _, out_dir = generator_tables[1.0]
    with open(out_dir / "degree_ccdf.csv", newline="") as fh:
        ccdf = list(csv.DictReader(fh))
    with open(out_dir / "degree_tail_loglog.csv", newline="") as fh:
        tail = list(csv.DictReader(fh))
    distinct = len({r["degree"] for r in ccdf})
    acceptance("C12 degree CCDF and tail tables", distinct >= 10 and len(tail) > 0,
               f"distinct degrees={distinct} tail rows={len(tail)}")

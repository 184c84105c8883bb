"""Random graphs generated through their modular decomposition tree.

A node with ``m`` vertices draws a type (series / parallel / prime) from
the root distribution or from its parent's row of a transition matrix,
then a number of children ``k`` from a child-count law, then splits its
vertices among the children with a Polya urn.  Children holding a single
vertex are leaves; the others recurse.  Prime nodes get a uniformly random
prime quotient on their ``k`` children.  Because series children are never
series and parallel children are never parallel, the tree built this way
is exactly the modular decomposition of the graph it encodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import Graph, iter_bits
from .md import PARALLEL, PRIME, SERIES, MDTree, expand
from .samplers import sample_prime_uniform

TYPES = (SERIES, PARALLEL, PRIME)
_INDEX = {t: i for i, t in enumerate(TYPES)}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Type distributions
# ---------------------------------------------------------------------------

def _check_distribution(probs: Sequence[float], what: str) -> tuple[float, float, float]:
    probs = tuple(float(p) for p in probs)
    if len(probs) != 3:
        raise ConfigError(f"{what}: expected 3 probabilities (series, parallel, prime)")
    if any(p < 0 or p > 1 for p in probs):
        raise ConfigError(f"{what}: probabilities must lie in [0, 1]")
    if abs(sum(probs) - 1.0) > 1e-12:
        raise ConfigError(f"{what}: probabilities sum to {sum(probs)}, not 1")
    return probs


@dataclass(frozen=True)
class TypeDistribution:
    series: float
    parallel: float
    prime: float

    def __post_init__(self):
        _check_distribution(self.as_tuple(), "type distribution")

    @classmethod
    def of(cls, probs: Sequence[float]) -> "TypeDistribution":
        return cls(*_check_distribution(probs, "type distribution"))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.series, self.parallel, self.prime)

    def prob(self, kind: str) -> float:
        return self.as_tuple()[_INDEX[kind]]


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix; rows and columns ordered series, parallel, prime."""

    rows: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if len(self.rows) != 3:
            raise ConfigError("transition matrix needs 3 rows")
        rows = tuple(_check_distribution(r, f"transition row {TYPES[i]}") for i, r in enumerate(self.rows))
        object.__setattr__(self, "rows", rows)
        if rows[0][0] != 0 or rows[1][1] != 0:
            raise ConfigError("series->series and parallel->parallel must have probability 0")

    @classmethod
    def of(cls, rows: Sequence[Sequence[float]]) -> "TransitionMatrix":
        return cls(tuple(tuple(r) for r in rows))

    def row(self, parent: str) -> tuple[float, float, float]:
        return self.rows[_INDEX[parent]]


# ---------------------------------------------------------------------------
# Child-count laws
# ---------------------------------------------------------------------------

class ChildCountLaw:
    """Distribution of the number of children, restricted on demand to a window."""

    def bounds(self, node_type: str) -> tuple[int, int | None]:
        raise NotImplementedError

    def pmf(self, node_type: str, ks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class TruncatedPoisson(ChildCountLaw):
    lam: float

    def bounds(self, node_type):
        return 2, None

    def pmf(self, node_type, ks):
        logp = ks * math.log(self.lam) - np.array([math.lgamma(k + 1) for k in ks])
        return np.exp(logp - logp.max())

    def to_dict(self):
        return {"kind": "poisson", "lam": self.lam}


@dataclass(frozen=True)
class UniformRange(ChildCountLaw):
    k_min: int
    k_max: int

    def __post_init__(self):
        if not 2 <= self.k_min <= self.k_max:
            raise ConfigError(f"uniform law needs 2 <= k_min <= k_max, got {self.k_min}, {self.k_max}")

    def bounds(self, node_type):
        return self.k_min, self.k_max

    def pmf(self, node_type, ks):
        return np.ones(len(ks))

    def to_dict(self):
        return {"kind": "uniform", "k_min": self.k_min, "k_max": self.k_max}


@dataclass(frozen=True)
class TruncatedPowerLaw(ChildCountLaw):
    """P(K = k) proportional to k**-alpha on [k_min, k_max]; k_max None means n."""

    alpha: float
    k_min: int = 2
    k_max: int | None = None

    def __post_init__(self):
        if self.k_min < 2 or (self.k_max is not None and self.k_max < self.k_min):
            raise ConfigError("power law needs 2 <= k_min <= k_max")

    def bounds(self, node_type):
        return self.k_min, self.k_max

    def pmf(self, node_type, ks):
        return np.power(ks.astype(float), -self.alpha)

    def to_dict(self):
        return {"kind": "power_law", "alpha": self.alpha, "k_min": self.k_min, "k_max": self.k_max}


@dataclass(frozen=True)
class PerType(ChildCountLaw):
    prime: ChildCountLaw
    series: ChildCountLaw
    parallel: ChildCountLaw

    def _law(self, node_type):
        return getattr(self, node_type)

    def bounds(self, node_type):
        return self._law(node_type).bounds(node_type)

    def pmf(self, node_type, ks):
        return self._law(node_type).pmf(node_type, ks)

    def to_dict(self):
        return {
            "kind": "per_type",
            "prime": self.prime.to_dict(),
            "series": self.series.to_dict(),
            "parallel": self.parallel.to_dict(),
        }


def law_from_dict(doc: dict) -> ChildCountLaw:
    kind = doc.get("kind")
    if kind == "poisson":
        return TruncatedPoisson(float(doc["lam"]))
    if kind == "uniform":
        return UniformRange(int(doc["k_min"]), int(doc["k_max"]))
    if kind == "power_law":
        k_max = doc.get("k_max")
        return TruncatedPowerLaw(float(doc["alpha"]), int(doc.get("k_min", 2)), None if k_max is None else int(k_max))
    if kind == "per_type":
        return PerType(law_from_dict(doc["prime"]), law_from_dict(doc["series"]), law_from_dict(doc["parallel"]))
    raise ConfigError(f"unknown child-count law {kind!r}")


def _window(law: ChildCountLaw, node_type: str, n_available: int, cap: int | None) -> tuple[int, int]:
    """Feasible [lo, hi] for k: law support clipped to [2 or 4, n_available]."""
    lo, hi = law.bounds(node_type)
    floor = 4 if node_type == PRIME else 2
    ceiling = n_available if cap is None or node_type != PRIME else min(n_available, cap)
    hi = ceiling if hi is None else min(hi, ceiling)
    lo = max(lo, floor)
    return lo, hi


def type_is_feasible(law: ChildCountLaw, node_type: str, n_available: int, cap: int | None = None) -> bool:
    lo, hi = _window(law, node_type, n_available, cap)
    return lo <= hi


def sample_child_count(
    law: ChildCountLaw,
    node_type: str,
    n_available: int,
    rng: np.random.Generator,
    cap: int | None = None,
) -> int:
    """Draw k from ``law`` renormalized onto its feasible window.

    For series and parallel nodes whose law has no mass below
    ``n_available`` the window collapses to ``n_available`` itself.
    """
    if n_available < 2:
        raise ValueError("a node needs at least 2 vertices to have children")
    lo, hi = _window(law, node_type, n_available, cap)
    if lo > hi:
        if node_type == PRIME:
            raise ValueError(f"no feasible child count for a prime node on {n_available} vertices")
        lo = hi = n_available
    if lo == hi:
        return lo
    ks = np.arange(lo, hi + 1)
    w = law.pmf(node_type, ks)
    return int(ks[rng.choice(len(ks), p=w / w.sum())])


# ---------------------------------------------------------------------------
# Polya urn allocation
# ---------------------------------------------------------------------------

def polya_allocate_sequential(n_vertices: int, k: int, gamma: float, rng: np.random.Generator) -> list[int]:
    """Urn run ball by ball: each free vertex joins child i w.p. ~ size_i**gamma."""
    sizes = np.ones(k)
    for _ in range(n_vertices - k):
        w = sizes if gamma == 1 else np.power(sizes, gamma)
        sizes[rng.choice(k, p=w / w.sum())] += 1
    return [int(s) for s in sizes]


def polya_allocate(n_vertices: int, k: int, gamma: float, rng: np.random.Generator) -> list[int]:
    """Split ``n_vertices`` among ``k`` children, one vertex each to start.

    For ``gamma == 1`` the urn's final counts are Dirichlet-multinomial with
    unit weights, which is sampled directly instead of ball by ball.
    """
    if not 1 <= k <= n_vertices:
        raise ValueError(f"cannot split {n_vertices} vertices into {k} non-empty children")
    if gamma < 1:
        raise ValueError("urn exponent gamma must be >= 1")
    free = n_vertices - k
    if free == 0:
        return [1] * k
    if gamma == 1:
        probs = rng.dirichlet(np.ones(k))
        return [int(c) + 1 for c in rng.multinomial(free, probs)]
    return polya_allocate_sequential(n_vertices, k, gamma, rng)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    pi0: TypeDistribution
    transition: TransitionMatrix
    child_law: ChildCountLaw
    gamma: float = 1.0
    prime_min_vertices: int = 4
    small_transition: TransitionMatrix | None = None
    seed: int | None = None
    force_connected: bool = False
    # Prime weight is multiplied by prime_level_decay**depth (1.0 = off).
    prime_level_decay: float = 1.0
    # Upper limit on prime child counts; None means no limit.
    prime_quotient_cap: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.gamma < 1:
            raise ConfigError("gamma must be >= 1")
        if self.prime_min_vertices < 4:
            raise ConfigError("prime_min_vertices must be >= 4")
        if self.small_transition is not None and any(r[2] != 0 for r in self.small_transition.rows):
            raise ConfigError("small_transition must give prime probability 0")
        if not 0 < self.prime_level_decay <= 1:
            raise ConfigError("prime_level_decay must lie in (0, 1]")
        if self.prime_quotient_cap is not None and self.prime_quotient_cap < 4:
            raise ConfigError("prime_quotient_cap must be >= 4")

    def root_distribution(self) -> tuple[float, float, float]:
        s, p, r = self.pi0.as_tuple()
        if self.force_connected:
            total = s + r
            if total == 0:
                return (1.0, 0.0, 0.0)
            return (s / total, 0.0, r / total)
        return (s, p, r)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pi0": list(self.pi0.as_tuple()),
            "transition": [list(r) for r in self.transition.rows],
            "small_transition": None if self.small_transition is None else [list(r) for r in self.small_transition.rows],
            "prime_min_vertices": self.prime_min_vertices,
            "child_law": self.child_law.to_dict(),
            "gamma": self.gamma,
            "seed": self.seed,
            "force_connected": self.force_connected,
            "prime_level_decay": self.prime_level_decay,
            "prime_quotient_cap": self.prime_quotient_cap,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorConfig":
        try:
            small = doc.get("small_transition")
            cap = doc.get("prime_quotient_cap")
            seed = doc.get("seed")
            return cls(
                n=int(doc["n"]),
                pi0=TypeDistribution.of(doc["pi0"]),
                transition=TransitionMatrix.of(doc["transition"]),
                child_law=law_from_dict(doc["child_law"]),
                gamma=float(doc.get("gamma", 1.0)),
                prime_min_vertices=int(doc.get("prime_min_vertices", 4)),
                small_transition=None if small is None else TransitionMatrix.of(small),
                seed=None if seed is None else int(seed),
                force_connected=bool(doc.get("force_connected", False)),
                prime_level_decay=float(doc.get("prime_level_decay", 1.0)),
                prime_quotient_cap=None if cap is None else int(cap),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed generator config: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "GeneratorConfig":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def with_(self, **changes) -> "GeneratorConfig":
        doc = self.to_dict()
        for key, value in changes.items():
            doc[key] = value.to_dict() if isinstance(value, ChildCountLaw) else value
        return GeneratorConfig.from_dict(doc)


def reference_config(alpha: float = 0.08, n: int = 100, seed: int | None = None) -> GeneratorConfig:
    """Prime root, prime->parallel favoured, series K=2, parallel K~U{2..6},
    prime K~power law on 6..n, primes forbidden below 6 vertices."""
    return GeneratorConfig(
        n=n,
        pi0=TypeDistribution(0.0, 0.0, 1.0),
        transition=TransitionMatrix.of([[0, 0.7, 0.3], [0.2, 0, 0.8], [0, 0.95, 0.05]]),
        small_transition=TransitionMatrix.of([[0, 1, 0], [1, 0, 0], [0, 1, 0]]),
        prime_min_vertices=6,
        child_law=PerType(
            prime=TruncatedPowerLaw(alpha, 6, None),
            series=UniformRange(2, 2),
            parallel=UniformRange(2, 6),
        ),
        gamma=1.0,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def type_probabilities(
    parent_type: str | None, n_vertices: int, config: GeneratorConfig, level: int = 0
) -> tuple[float, float, float]:
    """Distribution of a node's type after feasibility adjustments."""
    if parent_type is None:
        probs = list(config.root_distribution())
    elif n_vertices < config.prime_min_vertices and config.small_transition is not None:
        probs = list(config.small_transition.row(parent_type))
    else:
        probs = list(config.transition.row(parent_type))
    if n_vertices < config.prime_min_vertices:
        probs[2] = 0.0
    else:
        probs[2] *= config.prime_level_decay**level
    for i, t in enumerate(TYPES):
        if probs[i] and not type_is_feasible(config.child_law, t, n_vertices, config.prime_quotient_cap):
            probs[i] = 0.0
    total = sum(probs)
    if total == 0:
        # Nothing allowed is feasible: take the non-prime type the parent
        # permits (series at the root).
        fallback = PARALLEL if parent_type == SERIES else SERIES
        return tuple(float(t == fallback) for t in TYPES)
    return tuple(p / total for p in probs)


def sample_type(
    parent_type: str | None,
    n_vertices: int,
    config: GeneratorConfig,
    rng: np.random.Generator,
    level: int = 0,
) -> str:
    if n_vertices < 2:
        raise ValueError("only nodes with >= 2 vertices receive a type")
    probs = type_probabilities(parent_type, n_vertices, config, level)
    return TYPES[int(rng.choice(3, p=probs))]


@dataclass(frozen=True)
class GeneratedSample:
    tree: MDTree
    graph: Graph
    # leaf_parent[v] is the node holding v as a direct leaf child (the tree
    # itself when n == 1).
    leaf_parent: tuple[MDTree, ...] = field(repr=False)


def generate_tree(config: GeneratorConfig, rng: np.random.Generator) -> MDTree:
    """Draw an MD tree; vertices of each child form a contiguous block."""
    cap = config.prime_quotient_cap

    def build(start: int, size: int, parent_type: str | None, level: int) -> MDTree:
        if size == 1:
            return MDTree.leaf(start)
        kind = sample_type(parent_type, size, config, rng, level)
        k = sample_child_count(config.child_law, kind, size, rng, cap)
        sizes = polya_allocate(size, k, config.gamma, rng)
        quo = sample_prime_uniform(k, rng) if kind == PRIME else None
        children = []
        offset = start
        for s in sizes:
            children.append(build(offset, s, kind, level + 1))
            offset += s
        return MDTree(kind, tuple(children), quotient=quo)

    return build(0, config.n, None, 0)


def generate(config: GeneratorConfig, rng: np.random.Generator | None = None) -> GeneratedSample:
    if rng is None:
        rng = np.random.default_rng(config.seed)
    tree = generate_tree(config, rng)
    return make_sample(tree)


def make_sample(tree: MDTree) -> GeneratedSample:
    parent: list[MDTree | None] = [None] * tree.size
    if tree.is_leaf:
        parent[tree.vertex] = tree
    for node in tree.iter_nodes():
        for c in node.children:
            if c.is_leaf:
                parent[c.vertex] = node
    return GeneratedSample(tree=tree, graph=expand(tree), leaf_parent=tuple(parent))


# ---------------------------------------------------------------------------
# Tree-based structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathLevel:
    """One node on the root-to-leaf path of a vertex."""

    kind: str
    child_index: int                       # child containing the vertex
    neighbors: tuple[int, ...]             # adjacent children in the outer graph
    child_sizes: tuple[int, ...]           # vertex counts of all children
    neighbor_pairs: tuple[tuple[int, int], ...]  # adjacent pairs k < l among neighbors


@dataclass(frozen=True)
class VertexPath:
    vertex: int
    levels: tuple[PathLevel, ...]
    nodes: tuple[MDTree, ...] = field(repr=False)

    @property
    def length(self) -> int:
        return len(self.levels)


def _outer_masks(node: MDTree) -> list[int]:
    return list(node.outer_graph().adj_masks)


def vertex_path(tree: MDTree, v: int) -> VertexPath:
    if v not in tree.vertices:
        raise IndexError(f"vertex {v} not in tree")
    levels = []
    nodes = []
    node = tree
    while not node.is_leaf:
        idx = next(i for i, c in enumerate(node.children) if v in c.vertices)
        masks = _outer_masks(node)
        nbrs = tuple(iter_bits(masks[idx]))
        pairs = tuple((a, b) for a in nbrs for b in iter_bits(masks[a]) if a < b and masks[idx] >> b & 1)
        levels.append(
            PathLevel(
                kind=node.kind,
                child_index=idx,
                neighbors=nbrs,
                child_sizes=tuple(c.size for c in node.children),
                neighbor_pairs=pairs,
            )
        )
        nodes.append(node)
        node = node.children[idx]
    return VertexPath(vertex=v, levels=tuple(levels), nodes=tuple(nodes))


def _tree_of(sample_or_tree) -> MDTree:
    return sample_or_tree.tree if isinstance(sample_or_tree, GeneratedSample) else sample_or_tree


def degree_via_tree(sample: GeneratedSample | MDTree, v: int) -> int:
    """Sum over the path of v of the sizes of the children adjacent to v's child."""
    path = vertex_path(_tree_of(sample), v)
    return sum(lvl.child_sizes[k] for lvl in path.levels for k in lvl.neighbors)


def edge_count_via_tree(node: MDTree) -> int:
    """Edges of the graph induced on ``node``'s vertices, from the tree alone."""
    if node.is_leaf:
        return 0
    own = sum(node.children[a].size * node.children[b].size for a, b in node.outer_graph().edges)
    return own + sum(edge_count_via_tree(c) for c in node.children)


def triangles_via_tree(sample: GeneratedSample | MDTree, v: int, mode: str = "exact") -> int:
    """Triangles at ``v`` computed from the tree.

    ``paper-formula`` sums only products of sizes of adjacent neighbour
    children on the same level.  ``exact`` adds neighbour pairs inside one
    child (the child's own edges) and pairs from different levels, which
    are always adjacent since the deeper one lies in a module the shallower
    one is joined to.
    """
    path = vertex_path(_tree_of(sample), v)
    same_level = [
        sum(lvl.child_sizes[a] * lvl.child_sizes[b] for a, b in lvl.neighbor_pairs)
        for lvl in path.levels
    ]
    if mode == "paper-formula":
        return sum(same_level)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    level_deg = [sum(lvl.child_sizes[k] for k in lvl.neighbors) for lvl in path.levels]
    total = 0
    deeper = sum(level_deg)
    for j, (lvl, node) in enumerate(zip(path.levels, path.nodes)):
        deeper -= level_deg[j]
        inside = sum(edge_count_via_tree(node.children[k]) for k in lvl.neighbors)
        total += same_level[j] + inside + level_deg[j] * deeper
    return total


def block_adjacency(tree: MDTree) -> np.ndarray:
    """Adjacency matrix assembled by recursive block substitution.

    Rows follow the tree's leaf order: each node's children occupy
    consecutive ranges, diagonal blocks are filled recursively and the
    off-diagonal block (i, j) is constant, equal to the outer-graph entry.
    Returned indexed by vertex id.
    """
    order = [node.vertex for node in tree.iter_nodes() if node.is_leaf]
    n = len(order)
    a = np.zeros((n, n), dtype=np.int8)

    def fill(node: MDTree, start: int) -> None:
        if node.is_leaf:
            return
        bounds = []
        pos = start
        for c in node.children:
            bounds.append((pos, pos + c.size))
            fill(c, pos)
            pos += c.size
        for i, j in node.outer_graph().edges:
            (r0, r1), (c0, c1) = bounds[i], bounds[j]
            a[r0:r1, c0:c1] = 1
            a[c0:c1, r0:r1] = 1

    fill(tree, 0)
    inverse = np.empty(n, dtype=int)
    inverse[order] = np.arange(n)
    return a[np.ix_(inverse, inverse)]


def block_adjacency_graph(tree: MDTree) -> Graph:
    a = block_adjacency(tree)
    iu, ju = np.nonzero(np.triu(a, 1))
    return Graph(a.shape[0], zip(iu.tolist(), ju.tolist()))

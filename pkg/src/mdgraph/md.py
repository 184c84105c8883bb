"""Modular decomposition of simple undirected graphs.

The decomposition is computed top-down.  A vertex set that induces a
disconnected graph becomes a parallel node over its components, one whose
complement is disconnected becomes a series node over its co-components,
and otherwise the maximal proper modules partition it and form the
children of a prime node.  The last case is found from the maximal modules
avoiding a pivot vertex (partition refinement) plus minimal-module closures
on the resulting small quotient.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .graph import Graph, GraphError, graph_from_dict, graph_to_dict, iter_bits, to_dot

LEAF = "leaf"
SERIES = "series"
PARALLEL = "parallel"
PRIME = "prime"
KINDS = (LEAF, SERIES, PARALLEL, PRIME)


class TreeError(ValueError):
    """An MD tree violates its structural invariants."""


@dataclass(frozen=True, eq=True)
class MDTree:
    """A node of a modular decomposition tree; the root node is the tree.

    Leaves carry ``vertex``.  Internal nodes carry ordered ``children`` and,
    for prime nodes, the ``quotient`` graph indexed by child position.
    """

    kind: str
    children: tuple["MDTree", ...] = ()
    vertex: int | None = None
    quotient: Graph | None = None

    @classmethod
    def leaf(cls, v: int) -> "MDTree":
        return cls(LEAF, vertex=v)

    @property
    def is_leaf(self) -> bool:
        return self.kind == LEAF

    @cached_property
    def vertices(self) -> frozenset[int]:
        if self.is_leaf:
            return frozenset((self.vertex,))
        return frozenset().union(*(c.vertices for c in self.children))

    @cached_property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def min_vertex(self) -> int:
        return min(self.vertices)

    def outer_graph(self) -> Graph:
        """Graph on the children: complete, edgeless or the prime quotient."""
        k = len(self.children)
        if self.kind == SERIES:
            return Graph.complete(k)
        if self.kind == PARALLEL:
            return Graph(k)
        if self.kind == PRIME:
            return self.quotient
        raise TreeError("a leaf has no outer graph")

    def iter_nodes(self):
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


# ---------------------------------------------------------------------------
# Modules and primality
# ---------------------------------------------------------------------------

def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _is_module_mask(adj: Sequence[int], within: int, m: int) -> bool:
    for z in iter_bits(within & ~m):
        hit = adj[z] & m
        if hit and hit != m:
            return False
    return True


def is_module(g: Graph, m: Iterable[int]) -> bool:
    """True iff every vertex outside ``m`` sees all of ``m`` or none of it."""
    mask = _mask(m)
    if mask & ~g.full_mask:
        raise GraphError("module candidate contains vertices outside the graph")
    return _is_module_mask(g.adj_masks, g.full_mask, mask)


def _closure(adj: Sequence[int], within: int, a: int, b: int) -> int:
    """Smallest module of G[within] containing vertices ``a`` and ``b``.

    A vertex z outside M splits M iff z is adjacent to some u in M but not
    to ``a`` (or vice versa), i.e. z lies in N(u) xor N(a).
    """
    ref = adj[a] & within
    m = (1 << a) | (1 << b)
    todo = [b]
    while todo:
        u = todo.pop()
        new = (adj[u] ^ ref) & within & ~m
        if new:
            m |= new
            if m == within:
                return m
            todo.extend(iter_bits(new))
    return m


def _modules_avoiding(adj: Sequence[int], within: int, v: int) -> list[int]:
    """Maximal modules of G[within] not containing ``v``.

    They are the parts of the coarsest partition of ``within - {v}`` into
    modules, obtained by refining with every vertex's neighbourhood.
    """
    rest = within & ~(1 << v)
    parts = [p for p in (rest & adj[v], rest & ~adj[v]) if p]
    queue = deque(iter_bits(rest))
    queued = set(queue)
    while queue:
        z = queue.popleft()
        queued.discard(z)
        zbit = 1 << z
        nz = adj[z]
        refined = []
        for part in parts:
            if not part & zbit:
                inside = part & nz
                if inside and inside != part:
                    refined.append(inside)
                    refined.append(part ^ inside)
                    for u in iter_bits(part):
                        if u not in queued:
                            queued.add(u)
                            queue.append(u)
                    continue
            refined.append(part)
        parts = refined
    return parts


def _is_prime_masks(adj: Sequence[int], n: int) -> bool:
    if n < 4:
        return False
    full = (1 << n) - 1
    if any(p & (p - 1) for p in _modules_avoiding(adj, full, 0)):
        return False
    return all(_closure(adj, full, 0, u) == full for u in range(1, n))


def is_prime(g: Graph) -> bool:
    """True iff ``g`` has at least 4 vertices and only trivial modules.

    Graphs on 1-3 vertices are never reported prime: their decomposition
    root is a series or parallel node (or a leaf).
    """
    return _is_prime_masks(g.adj_masks, g.n)


# ---------------------------------------------------------------------------
# Quotient and composition
# ---------------------------------------------------------------------------

def quotient(g: Graph, partition: Sequence[Iterable[int]]) -> Graph:
    """Graph on the blocks of a modular partition, in the given block order."""
    blocks = [_mask(b) for b in partition]
    union = 0
    for b in blocks:
        if not b or union & b:
            raise GraphError("partition blocks must be non-empty and disjoint")
        union |= b
    if union != g.full_mask:
        raise GraphError("partition does not cover the vertex set")
    adj = g.adj_masks
    for i, b in enumerate(blocks):
        if not _is_module_mask(adj, g.full_mask, b):
            raise GraphError(f"block {i} is not a module")
    reps = [(b & -b).bit_length() - 1 for b in blocks]
    edges = [
        (i, j)
        for i in range(len(blocks))
        for j in range(i + 1, len(blocks))
        if adj[reps[i]] & blocks[j]
    ]
    return Graph(len(blocks), edges)


def compose(inner: Sequence[Graph], outer: Graph) -> Graph:
    """Substitute ``inner[i]`` for vertex ``i`` of ``outer``.

    Inner graphs occupy consecutive vertex ranges in order; each outer edge
    {i, j} joins every vertex of block i to every vertex of block j.
    """
    if len(inner) != outer.n:
        raise GraphError(f"need {outer.n} inner graphs, got {len(inner)}")
    offsets = [0]
    for h in inner:
        offsets.append(offsets[-1] + h.n)
    edges = [(u + offsets[i], v + offsets[i]) for i, h in enumerate(inner) for u, v in h.edges]
    for i, j in outer.edges:
        edges.extend(
            (a, b)
            for a in range(offsets[i], offsets[i + 1])
            for b in range(offsets[j], offsets[j + 1])
        )
    return Graph(offsets[-1], edges)


# ---------------------------------------------------------------------------
# Tree validation, expansion, canonical form
# ---------------------------------------------------------------------------

def validate_tree(tree: MDTree) -> None:
    """Raise :class:`TreeError` unless ``tree`` is a valid MD tree on 0..n-1."""
    seen: set[int] = set()
    for node in tree.iter_nodes():
        if node.kind not in KINDS:
            raise TreeError(f"unknown node kind {node.kind!r}")
        if node.is_leaf:
            if node.children or node.vertex is None:
                raise TreeError("leaf must carry a vertex and no children")
            if node.vertex in seen:
                raise TreeError(f"vertex {node.vertex} appears twice")
            seen.add(node.vertex)
            continue
        k = len(node.children)
        if k < 2:
            raise TreeError(f"{node.kind} node with {k} children")
        for child in node.children:
            if child.kind == node.kind and node.kind in (SERIES, PARALLEL):
                raise TreeError(f"{node.kind} node has a {child.kind} child")
        if node.kind == PRIME:
            q = node.quotient
            if q is None or q.n != k:
                raise TreeError("prime node needs a quotient on its children")
            if k < 4 or not is_prime(q):
                raise TreeError("prime node quotient is not a prime graph")
        elif node.quotient is not None:
            raise TreeError(f"{node.kind} node must not carry a quotient")
    if seen != set(range(len(seen))):
        raise TreeError("leaf vertices must be exactly 0..n-1")


def expand(tree: MDTree) -> Graph:
    """The graph whose modular decomposition is ``tree``."""
    validate_tree(tree)
    n = tree.size
    edges = []
    for node in tree.iter_nodes():
        if node.is_leaf or node.kind == PARALLEL:
            continue
        ch = node.children
        for i, j in node.outer_graph().edges:
            edges.extend((a, b) for a in ch[i].vertices for b in ch[j].vertices)
    return Graph(n, edges)


def canonical(tree: MDTree) -> MDTree:
    """Reorder children by minimum vertex, permuting prime quotients to match."""
    if tree.is_leaf:
        return tree
    children = [canonical(c) for c in tree.children]
    order = sorted(range(len(children)), key=lambda i: children[i].min_vertex)
    q = None
    if tree.kind == PRIME:
        pos = {old: new for new, old in enumerate(order)}
        q = Graph(len(order), [(pos[u], pos[v]) for u, v in tree.quotient.edges])
    return MDTree(tree.kind, tuple(children[i] for i in order), quotient=q)


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------

def _components(adj: Sequence[int], within: int, complement: bool) -> list[int]:
    comps = []
    rest = within
    while rest:
        comp = frontier = rest & -rest
        while frontier:
            nxt = 0
            for u in iter_bits(frontier):
                nxt |= ~adj[u] if complement else adj[u]
            frontier = nxt & rest & ~comp
            comp |= frontier
        comps.append(comp)
        rest &= ~comp
    return comps


def _prime_children(adj: Sequence[int], within: int) -> list[int]:
    """Maximal proper modules of a set that is connected and co-connected."""
    v = (within & -within).bit_length() - 1
    parts = _modules_avoiding(adj, within, v)
    # Quotient over {v} and the parts; index 0 stands for v.
    reps = [v] + [(p & -p).bit_length() - 1 for p in parts]
    k = len(reps)
    qadj = [0] * k
    for i in range(k):
        for j in range(i + 1, k):
            if adj[reps[i]] >> reps[j] & 1:
                qadj[i] |= 1 << j
                qadj[j] |= 1 << i
    qfull = (1 << k) - 1
    # A part joins v's maximal module iff some proper module holds both.
    own = 1 << v
    others = []
    for i in range(1, k):
        if _closure(qadj, qfull, 0, i) != qfull:
            own |= parts[i - 1]
        else:
            others.append(parts[i - 1])
    return [own] + others


def modular_decomposition(g: Graph) -> MDTree:
    """Canonical modular decomposition tree of ``g`` (requires n >= 1)."""
    if g.n == 0:
        raise GraphError("cannot decompose the empty graph")
    adj = g.adj_masks
    # Pass 1 (top-down): kind, child sets and quotient for each vertex set.
    plan: list[tuple[int, str, list[int], Graph | None]] = []
    stack = [g.full_mask]
    while stack:
        s = stack.pop()
        if s & (s - 1) == 0:
            plan.append((s, LEAF, [], None))
            continue
        kind, quo = PARALLEL, None
        children = _components(adj, s, complement=False)
        if len(children) == 1:
            kind = SERIES
            children = _components(adj, s, complement=True)
            if len(children) == 1:
                kind = PRIME
                children = _prime_children(adj, s)
        children.sort(key=lambda c: c & -c)
        if kind == PRIME:
            reps = [(c & -c).bit_length() - 1 for c in children]
            quo = Graph(
                len(children),
                [
                    (i, j)
                    for i in range(len(children))
                    for j in range(i + 1, len(children))
                    if adj[reps[i]] >> reps[j] & 1
                ],
            )
        plan.append((s, kind, children, quo))
        stack.extend(children)
    # Pass 2 (bottom-up): children always appear after their parent in plan.
    built: dict[int, MDTree] = {}
    for s, kind, children, quo in reversed(plan):
        if kind == LEAF:
            built[s] = MDTree.leaf(s.bit_length() - 1)
        else:
            built[s] = MDTree(kind, tuple(built.pop(c) for c in children), quotient=quo)
    return built[g.full_mask]


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MDStats:
    n_prime: int
    n_series: int
    n_parallel: int
    density_prime: float
    density_series: float
    density_parallel: float
    # Internal levels, root = 1; leaves add nothing.
    levels: int
    # Levels including the leaf level (the "tree depth" reading).
    depth: int
    largest_prime: int
    root_kind: str

    @property
    def n_internal(self) -> int:
        return self.n_prime + self.n_series + self.n_parallel

    def as_row(self) -> dict:
        row = dict(self.__dict__)
        row["n_internal"] = self.n_internal
        return row


def md_stats(tree: MDTree) -> MDStats:
    counts = {SERIES: 0, PARALLEL: 0, PRIME: 0}
    largest = 0
    levels = 0
    depth = 0
    stack = [(tree, 1)]
    while stack:
        node, d = stack.pop()
        depth = max(depth, d)
        if node.is_leaf:
            continue
        levels = max(levels, d)
        counts[node.kind] += 1
        if node.kind == PRIME:
            largest = max(largest, len(node.children))
        stack.extend((c, d + 1) for c in node.children)
    total = sum(counts.values())
    dens = {k: (c / total if total else 0.0) for k, c in counts.items()}
    return MDStats(
        n_prime=counts[PRIME],
        n_series=counts[SERIES],
        n_parallel=counts[PARALLEL],
        density_prime=dens[PRIME],
        density_series=dens[SERIES],
        density_parallel=dens[PARALLEL],
        levels=levels,
        depth=depth,
        largest_prime=largest,
        root_kind=tree.kind,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def tree_to_dict(tree: MDTree) -> dict:
    if tree.is_leaf:
        return {"kind": LEAF, "vertex": tree.vertex}
    doc = {"kind": tree.kind, "children": [tree_to_dict(c) for c in tree.children]}
    if tree.kind == PRIME:
        doc["quotient"] = graph_to_dict(tree.quotient)
    return doc


def tree_from_dict(doc: dict) -> MDTree:
    try:
        kind = doc["kind"]
        if kind == LEAF:
            return MDTree.leaf(int(doc["vertex"]))
        if kind not in KINDS:
            raise TreeError(f"unknown node kind {kind!r}")
        children = tuple(tree_from_dict(c) for c in doc["children"])
        q = graph_from_dict(doc["quotient"]) if kind == PRIME else None
    except (KeyError, TypeError) as exc:
        raise TreeError(f"malformed tree document: {exc}") from exc
    return MDTree(kind, children, quotient=q)


def tree_to_json(tree: MDTree) -> str:
    return json.dumps(tree_to_dict(tree))


def tree_from_json(text: str) -> MDTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeError(f"invalid JSON: {exc}") from exc
    tree = tree_from_dict(doc)
    validate_tree(tree)
    return tree


def tree_to_dot(tree: MDTree, one_based: bool = False) -> str:
    """DOT rendering of the tree; internal labels are kinds, leaves are vertices."""
    offset = 1 if one_based else 0
    lines = ["digraph MD {"]
    ids = {}
    for i, node in enumerate(tree.iter_nodes()):
        ids[id(node)] = i
        label = node.vertex + offset if node.is_leaf else node.kind
        shape = "circle" if node.is_leaf else "box"
        lines.append(f'  n{i} [label="{label}", shape={shape}];')
    for node in tree.iter_nodes():
        for c in node.children:
            lines.append(f"  n{ids[id(node)]} -> n{ids[id(c)]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def prime_subgraph_dot(node: MDTree, one_based: bool = False) -> str:
    """DOT of a prime node's quotient, each child labelled by its smallest vertex."""
    if node.kind != PRIME:
        raise TreeError("node is not prime")
    offset = 1 if one_based else 0
    labels = [c.min_vertex + offset for c in node.children]
    return to_dot(node.quotient, name="prime", labels=labels)


def largest_prime_node(tree: MDTree) -> MDTree | None:
    primes = [n for n in tree.iter_nodes() if n.kind == PRIME]
    return max(primes, key=lambda n: len(n.children), default=None)

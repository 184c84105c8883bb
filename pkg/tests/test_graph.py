import math
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings

from mdgraph.graph import (
    EdgeListParseError,
    Graph,
    GraphError,
    degree,
    degrees,
    distances_from,
    from_edge_list,
    from_json,
    global_clustering,
    local_clustering,
    metrics,
    to_dot,
    to_edge_list,
    to_json,
    triangles_at,
)

from oracles import all_pairs, global_clustering_triples, graphs, triangles_matrix


class TestEdgeList:
    def test_zero_based_path(self):
        g = from_edge_list("0 1\n1 2")
        assert g == Graph(3, [(0, 1), (1, 2)])

    def test_one_based_reindexes(self):
        assert from_edge_list("1 2\n2 3\n3 4", one_based=True) == Graph.path(4)

    def test_comments_blank_lines_and_duplicates(self):
        g = from_edge_list("# header\n\n0 1\n1 0\n0 1\n")
        assert g.num_edges == 1

    def test_bad_token_reports_line(self):
        with pytest.raises(EdgeListParseError) as err:
            from_edge_list("0 1\n1 two\n")
        assert err.value.lineno == 2

    def test_wrong_token_count(self):
        with pytest.raises(EdgeListParseError):
            from_edge_list("0 1 2\n")

    def test_self_loop_rejected_unless_dropped(self):
        with pytest.raises(EdgeListParseError):
            from_edge_list("0 1\n2 2\n")
        g = from_edge_list("0 1\n2 2\n", drop_loops=True)
        assert g.edges == {(0, 1)} and g.n == 2

    def test_n_header_keeps_isolated_top_vertices(self):
        g = from_edge_list("n=5\n0 1\n")
        assert g.n == 5 and degree(g, 4) == 0

    def test_n_header_too_small(self):
        with pytest.raises(GraphError):
            from_edge_list("n=2\n0 3\n")

    def test_zachary_size(self, zachary):
        assert (zachary.n, zachary.num_edges) == (34, 78)

    def test_zachary_actor_one_degree(self, zachary):
        text = resources.files("mdgraph.data").joinpath("zachary.edges").read_text()
        rows = [line.split() for line in text.splitlines() if line and line[0].isdigit()]
        assert degree(zachary, 0) == sum("1" in row for row in rows) == 16


class TestGraph:
    def test_invariants_enforced(self):
        with pytest.raises(GraphError):
            Graph(3, [(1, 1)])
        with pytest.raises(GraphError):
            Graph(3, [(0, 3)])

    def test_edges_are_unordered(self):
        assert Graph(2, [(1, 0)]) == Graph(2, [(0, 1)])

    def test_complement(self, p4):
        assert p4.complement() == Graph(4, [(0, 2), (0, 3), (1, 3)])


class TestLocalQuantities:
    def test_degree(self, k4):
        assert [degree(k4, v) for v in range(4)] == [3, 3, 3, 3]
        assert degree(Graph(3), 1) == 0

    def test_degree_out_of_range(self, k4):
        with pytest.raises(IndexError):
            degree(k4, 4)
        with pytest.raises(IndexError):
            triangles_at(k4, -1)

    @pytest.mark.parametrize(
        "g, expected",
        [(Graph.complete(3), 1), (Graph.path(4), 0), (Graph.complete(5), 6)],
    )
    def test_triangles(self, g, expected):
        assert all(triangles_at(g, v) == expected for v in range(g.n))

    def test_local_clustering(self):
        assert local_clustering(Graph.complete(3), 0) == 1.0
        star = Graph(4, [(0, 1), (0, 2), (0, 3)])
        assert local_clustering(star, 0) == 0.0
        assert local_clustering(Graph(1), 0) == 0.0

    @pytest.mark.parametrize(
        "g, expected",
        [(Graph.complete(4), 1.0), (Graph.path(3), 0.0), (Graph.cycle(5), 0.0)],
    )
    def test_global_clustering(self, g, expected):
        assert global_clustering(g) == expected

    def test_global_clustering_without_triples(self):
        assert global_clustering(Graph(4, [(0, 1), (2, 3)])) is None

    def test_distances(self, p4, k4):
        assert distances_from(p4, 0) == [0, 1, 2, 3]
        assert distances_from(k4, 2) == [1, 1, 0, 1]
        assert distances_from(Graph(4, [(0, 1), (2, 3)]), 0)[2] is None


class TestMetrics:
    def test_k4(self, k4):
        m = metrics(k4)
        assert (m.edge_density, m.diameter, m.global_clustering, m.connected) == (1.0, 1, 1.0, True)

    def test_p4(self, p4):
        m = metrics(p4)
        assert (m.edge_density, m.diameter, m.global_clustering) == (0.5, 3, 0.0)
        assert m.avg_distance == pytest.approx(10 / 6)

    def test_edgeless_flagged_disconnected(self):
        m = metrics(Graph(100))
        assert m.edge_density == 0 and not m.connected and m.avg_distance is None

    def test_disconnected_reports_largest_component_diameter(self):
        g = Graph(7, [(0, 1), (1, 2), (2, 3), (4, 5)])
        m = metrics(g)
        assert not m.connected and m.diameter == 3

    def test_histogram_sums_to_n(self, zachary):
        assert sum(metrics(zachary).degree_histogram.values()) == 34


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_local_invariants(g):
    degs = degrees(g)
    assert sum(degs) == 2 * g.num_edges
    tri = triangles_matrix(g)
    for v in range(g.n):
        assert triangles_at(g, v) == tri[v]
        assert tri[v] <= math.comb(degs[v], 2)
        assert 0.0 <= local_clustering(g, v) <= 1.0


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_global_clustering_matches_triple_enumeration(g):
    expected = global_clustering_triples(g)
    got = global_clustering(g)
    assert got == pytest.approx(expected) if expected is not None else got is None


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_distances_match_scipy(g):
    d = all_pairs(g)
    finite = d[np.isfinite(d) & (d > 0)]
    m = metrics(g)
    if finite.size:
        assert m.avg_distance == pytest.approx(finite.mean())
    for v in range(g.n):
        ours = distances_from(g, v)
        assert [x if x is not None else math.inf for x in ours] == d[v].tolist()
    if m.connected and g.n > 1:
        assert m.diameter == int(d.max())


def test_serialization_roundtrip_random():
    rng = np.random.default_rng(3)
    for n in list(range(1, 20)) + [50, 100]:
        g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.2])
        assert from_json(to_json(g)) == g
        assert from_edge_list(to_edge_list(g)) == g
        assert from_edge_list(to_edge_list(g, one_based=True), one_based=True) == g


def test_dot_output():
    assert to_dot(Graph(1)).count("--") == 0
    dot = to_dot(Graph.path(3))
    assert dot.count("--") == 2
    assert dot == to_dot(Graph(3, [(2, 1), (0, 1)]))


def test_json_rejects_garbage():
    with pytest.raises(GraphError):
        from_json("{not json")
    with pytest.raises(GraphError):
        from_json('{"edges": []}')

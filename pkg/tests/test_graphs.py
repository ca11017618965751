import itertools

import networkx as nx
import numpy as np
import pytest

from entrokit.graphs import (
    WeightedGraph,
    correlation_matrix,
    distance_graph,
    mst,
    pmfg,
)
from entrokit.series import ReturnSeries


def random_complete_graph(n, seed):
    rng = np.random.default_rng(seed)
    nodes = tuple(f"N{i:03d}" for i in range(n))
    edges = tuple(
        (nodes[i], nodes[j], float(rng.uniform(0.1, 2.0)))
        for i in range(n)
        for j in range(i + 1, n)
    )
    return WeightedGraph(nodes=nodes, edges=edges)


def brute_force_mst_weight(graph):
    """Exhaustive search over all spanning trees (edge subsets of size n-1)."""
    n = len(graph.nodes)
    best = None
    for subset in itertools.combinations(graph.edges, n - 1):
        parent = {v: v for v in graph.nodes}

        def find(v):
            while parent[v] != v:
                v = parent[v]
            return v

        ok = True
        for i, j, _ in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            weight = sum(d for _, _, d in subset)
            best = weight if best is None else min(best, weight)
    return best


def verify_planar_embedding(edges, nodes):
    """Independent certificate check: Euler bound plus Euler's formula on the
    combinatorial embedding's face traversal."""
    n, e = len(nodes), len(edges)
    assert e <= 3 * n - 6
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from((i, j) for i, j, _ in edges)
    planar, embedding = nx.check_planarity(g)
    assert planar
    half_edges = {(u, v) for u, v in embedding.edges()}
    faces = 0
    while half_edges:
        u, v = next(iter(half_edges))
        faces += 1
        for fu, fv in _face_walk(embedding, u, v):
            half_edges.discard((fu, fv))
    components = nx.number_connected_components(g)
    assert n - e + faces == 1 + components  # Euler's formula per component


def _face_walk(embedding, u, v):
    walk = []
    start = (u, v)
    while True:
        walk.append((u, v))
        u, v = embedding.next_face_half_edge(u, v)
        if (u, v) == start:
            return walk


class TestCorrelationMatrix:
    def test_identical_series(self):
        a = ReturnSeries("A", (0.1, -0.2, 0.3, 0.0))
        b = ReturnSeries("B", (0.1, -0.2, 0.3, 0.0))
        corr = correlation_matrix([a, b])
        assert corr.rho[0, 1] == pytest.approx(1.0)
        graph = distance_graph(corr)
        assert graph.edges[0][2] == pytest.approx(0.0)

    def test_anticorrelated(self):
        a = ReturnSeries("A", (0.1, -0.2, 0.3))
        b = ReturnSeries("B", (-0.1, 0.2, -0.3))
        corr = correlation_matrix([a, b])
        assert corr.rho[0, 1] == pytest.approx(-1.0)
        assert distance_graph(corr).edges[0][2] == pytest.approx(2.0)

    def test_hand_computed_pairwise(self):
        x = np.array([1.0, 2.0, 4.0, 3.0])
        y = np.array([1.0, 3.0, 2.0, 4.0])
        expected = np.corrcoef(x, y)[0, 1]
        corr = correlation_matrix(
            [ReturnSeries("X", tuple(x)), ReturnSeries("Y", tuple(y))]
        )
        assert corr.rho[0, 1] == pytest.approx(expected)

    def test_zero_variance_named(self):
        a = ReturnSeries("A", (0.1, -0.2, 0.3))
        flat = ReturnSeries("FLAT", (0.0, 0.0, 0.0))
        with pytest.raises(ValueError, match="FLAT"):
            correlation_matrix([a, flat])

    def test_misaligned_lengths(self):
        with pytest.raises(ValueError):
            correlation_matrix(
                [ReturnSeries("A", (0.1, 0.2, 0.3)), ReturnSeries("B", (0.1, 0.2))]
            )


class TestMst:
    def test_unique_three_node_tree(self):
        graph = WeightedGraph(
            nodes=("A", "B", "C"),
            edges=(("A", "B", 0.1), ("B", "C", 0.2), ("A", "C", 0.9)),
        )
        tree = mst(graph)
        assert {(i, j) for i, j, _ in tree.edges} == {("A", "B"), ("B", "C")}

    def test_edge_count(self):
        for n in (4, 7, 12):
            tree = mst(random_complete_graph(n, seed=n))
            assert len(tree.edges) == n - 1

    def test_matches_exhaustive_minimum(self):
        for seed in range(4):
            graph = random_complete_graph(6, seed=seed)
            tree = mst(graph)
            total = sum(d for _, _, d in tree.edges)
            assert total == pytest.approx(brute_force_mst_weight(graph))

    def test_disconnected_rejected(self):
        graph = WeightedGraph(nodes=("A", "B", "C"), edges=(("A", "B", 0.5),))
        with pytest.raises(ValueError):
            mst(graph)

    def test_deterministic_under_ties(self):
        graph = WeightedGraph(
            nodes=("A", "B", "C"),
            edges=(("A", "B", 0.5), ("A", "C", 0.5), ("B", "C", 0.5)),
        )
        t1, t2 = mst(graph), mst(graph)
        assert t1.edges == t2.edges == (("A", "B", 0.5), ("A", "C", 0.5))

    def test_distance_increase_never_adds_edge(self):
        graph = random_complete_graph(8, seed=42)
        tree = mst(graph)
        kept = {(i, j) for i, j, _ in tree.edges}
        for idx, (i, j, d) in enumerate(graph.edges):
            if (i, j) in kept:
                continue
            bumped = list(graph.edges)
            bumped[idx] = (i, j, d + 0.5)
            tree2 = mst(WeightedGraph(nodes=graph.nodes, edges=tuple(bumped)))
            assert (i, j) not in {(a, b) for a, b, _ in tree2.edges}


class TestPmfg:
    def test_k4_keeps_all_edges(self):
        filtered = pmfg(random_complete_graph(4, seed=0))
        assert len(filtered.edges) == 6

    def test_k5_drops_exactly_one(self):
        graph = random_complete_graph(5, seed=1)
        filtered = pmfg(graph)
        assert len(filtered.edges) == 9
        dropped = set((i, j) for i, j, _ in graph.edges) - set(
            (i, j) for i, j, _ in filtered.edges
        )
        # greedy insertion keeps the 9 shortest edges of K5; the longest goes
        longest = max(graph.edges, key=lambda e: e[2])
        assert dropped == {(longest[0], longest[1])}

    def test_edge_count_formula(self):
        for n in (3, 6, 10, 25):
            filtered = pmfg(random_complete_graph(n, seed=n))
            assert len(filtered.edges) == 3 * (n - 2)

    def test_contains_mst(self):
        for seed in range(3):
            graph = random_complete_graph(12, seed=100 + seed)
            tree_edges = {(i, j) for i, j, _ in mst(graph).edges}
            pmfg_edges = {(i, j) for i, j, _ in pmfg(graph).edges}
            assert tree_edges <= pmfg_edges

    def test_planarity_certificate(self):
        for n in (8, 15, 30):
            graph = random_complete_graph(n, seed=200 + n)
            filtered = pmfg(graph)
            verify_planar_embedding(filtered.edges, filtered.nodes)

    def test_too_small(self):
        with pytest.raises(ValueError):
            pmfg(random_complete_graph(2, seed=0))

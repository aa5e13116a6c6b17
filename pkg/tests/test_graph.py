import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierpostman.errors import InfeasibleError, InputError, PreconditionError
from hierpostman.generate import random_connected_graph
from hierpostman.graph import (
    PathIndex,
    Walk,
    WeightedGraph,
    connected_components,
    edge_key,
    euler_walk,
    metric_closure,
    min_t_join,
    multiset_weight,
    odd_vertices,
    shortest_paths,
    spanning_connector,
)
from oracles import brute_t_join_weight, floyd_warshall


def tri():
    return WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])


class TestWeightedGraph:
    def test_edges_are_canonical(self):
        g = WeightedGraph.from_edges([("b", "a", 3)])
        assert g.edges == (("a", "b"),)
        assert g.weight("b", "a") == 3

    @pytest.mark.parametrize("edges", [
        [("a", "b", -1)],
        [("a", "b", 1.5)],
        [("a", "b", True)],
        [("a", "b", 1), ("b", "a", 2)],
    ])
    def test_rejects_bad_edges(self, edges):
        with pytest.raises(InputError):
            WeightedGraph.from_edges(edges)

    def test_rejects_self_loop_and_undeclared_endpoint(self):
        with pytest.raises(InputError):
            edge_key("a", "a")
        with pytest.raises(InputError):
            WeightedGraph(["a"], {("a", "b"): 1})

    def test_isolated_vertices_are_kept(self):
        g = WeightedGraph.from_edges([("a", "b", 1)], vertices="abz")
        assert g.vertices == ("a", "b", "z")
        assert g.degree("z") == 0

    def test_totals(self):
        g = tri()
        assert g.total_weight == 3 and g.max_weight == 1
        assert g.edge_subgraph([("a", "b")]).edges == (("a", "b"),)


class TestWalk:
    def test_counts_and_weight(self):
        g = tri()
        w = Walk("abcab")
        assert w.closed is False
        assert w.edge_counts() == Counter({("a", "b"): 2, ("b", "c"): 1, ("a", "c"): 1})
        assert w.weight(g) == 4
        assert w.is_walk_in(g)

    def test_then_and_reverse(self):
        assert Walk("ab").then(Walk("bc")).vertices == ("a", "b", "c")
        assert Walk("abc").reversed().vertices == ("c", "b", "a")
        with pytest.raises(PreconditionError):
            Walk("ab").then(Walk("cd"))


def test_components_ordered_and_restricted():
    g = WeightedGraph.from_edges([("a", "b", 1), ("c", "d", 1), ("b", "c", 1)])
    assert connected_components(g) == [frozenset("abcd")]
    comps = connected_components(g, [("a", "b"), ("c", "d")])
    assert comps == [frozenset("ab"), frozenset("cd")]


def test_dijkstra_matches_floyd_warshall():
    rng = random.Random(21)
    for _ in range(60):
        n = rng.randint(2, 9)
        g = random_connected_graph(rng, n, rng.randint(n - 1, n * (n - 1) // 2), max_weight=6, min_weight=0)
        fw = floyd_warshall(g)
        for s in g.vertices:
            sp = shortest_paths(g, s)
            for v in g.vertices:
                assert sp.distance(v) == fw[s][v]
                p = sp.path(v)
                assert p[0] == s and p[-1] == v
                assert Walk(p).weight(g) == fw[s][v]


def test_unreachable_and_allowed_edges():
    g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)], vertices="abcz")
    sp = shortest_paths(g, "a", allowed=[("a", "b")])
    assert sp.distance("b") == 1
    assert sp.distance("c") is None and not sp.reachable("z")


def test_metric_closure_distances_and_expansion():
    g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 2), ("a", "c", 5)])
    mc = metric_closure(g, ["a", "c"])
    assert mc.graph.weight("a", "c") == 3
    assert mc.expand("c", "a") == ("c", "b", "a")
    g2 = WeightedGraph.from_edges([("a", "b", 1)], vertices="abz")
    with pytest.raises(InfeasibleError):
        metric_closure(g2, ["a", "z"])


class TestEulerWalk:
    def test_closed_and_open(self):
        m = Counter({("a", "b"): 3, ("b", "c"): 1, ("a", "c"): 1})
        w = euler_walk(m, "a", "a")
        assert w.closed and w.edge_counts() == m
        w = euler_walk(Counter({("a", "b"): 1, ("b", "c"): 1}), "c", "a")
        assert w.vertices == ("c", "b", "a")

    def test_errors_name_the_problem(self):
        with pytest.raises(PreconditionError, match="parity violated at vertex 'a'"):
            euler_walk(Counter({("a", "b"): 1}), "a", "a")
        with pytest.raises(PreconditionError, match="disconnected"):
            euler_walk(Counter({("a", "b"): 2, ("c", "d"): 2}), "a", "a")

    def test_empty(self):
        assert euler_walk(Counter(), "x", "x").vertices == ("x",)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=12))
    def test_doubled_connected_multigraph_always_walks(self, pairs):
        m = Counter()
        for u, v in pairs:
            if u != v:
                m[edge_key(u, v)] += 2
        if not m:
            return
        # keep the component of the smallest edge
        root = min(m)[0]
        g = WeightedGraph({v for e in m for v in e}, {e: 1 for e in m})
        comp = next(c for c in connected_components(g) if root in c)
        m = Counter({e: k for e, k in m.items() if e[0] in comp})
        w = euler_walk(m, root, root)
        assert w.closed and w.edge_counts() == m


def test_spanning_connector_is_minimum():
    g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 5), ("a", "c", 2), ("c", "d", 1)])
    assert spanning_connector(g, [("a", "b")]) == frozenset({("a", "c"), ("c", "d")})
    assert spanning_connector(g, g.edges) == frozenset()
    with pytest.raises(InfeasibleError):
        spanning_connector(WeightedGraph.from_edges([("a", "b", 1)], vertices="abc"), [])


class TestTJoin:
    def test_path(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)])
        assert min_t_join(g, ["a", "c"]) == Counter({("a", "b"): 1, ("b", "c"): 1})
        assert min_t_join(g, []) == Counter()
        with pytest.raises(PreconditionError):
            min_t_join(g, ["a"])

    def test_matches_exhaustive_search(self):
        rng = random.Random(33)
        for _ in range(150):
            n = rng.randint(2, 7)
            m = rng.randint(n - 1, min(10, n * (n - 1) // 2))
            g = random_connected_graph(rng, n, m, max_weight=5, min_weight=0)
            size = rng.choice([x for x in (0, 2, 4, 6) if x <= n])
            t = rng.sample(list(g.vertices), size)
            join = min_t_join(g, t)
            assert odd_vertices(join) == set(t)
            assert all(k == 1 for k in join.values())
            assert multiset_weight(g, join) == brute_t_join_weight(g, t)

    def test_shared_index(self):
        g = tri()
        idx = PathIndex(g)
        assert multiset_weight(g, min_t_join(g, ["a", "b"], index=idx)) == 1

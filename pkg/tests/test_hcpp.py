import random
from fractions import Fraction

import pytest

from hierpostman.errors import InfeasibleError, InputError, PreconditionError, SizeLimitError
from hierpostman.generate import random_connected_graph, random_hcpp
from hierpostman.graph import Walk, WeightedGraph
from hierpostman.hcpp import (
    Arc,
    HcppInstance,
    LayeredDag,
    LayerPath,
    assemble_walk,
    best_layer_path,
    build_layered_dag,
    check_feasibility,
    class_component_stats,
    layer_vertex_sets,
    solve_hcppl,
    validate_walk,
)
from oracles import brute_hcpp_weight

TOY_ARCS = {
    (1, "a", "b"): 2, (1, "b", "b"): 4,
    (2, "b", "a"): 10, (2, "b", "b"): 8,
    (3, "a", "a"): 5, (3, "a", "b"): 3, (3, "b", "a"): 3, (3, "b", "b"): 5,
}


def eulerian_square():
    g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 2), ("c", "d", 3), ("a", "d", 4)])
    return HcppInstance(g, (frozenset(g.edges),))


class TestInstance:
    def test_partition_is_enforced(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)])
        with pytest.raises(InputError, match="no class"):
            HcppInstance(g, ({("a", "b")},))
        with pytest.raises(InputError, match="classes 1 and 2"):
            HcppInstance(g, ({("a", "b"), ("b", "c")}, {("a", "b")}))
        with pytest.raises(InputError, match="empty"):
            HcppInstance(g, ({("a", "b"), ("b", "c")}, set()))

    def test_cyclic_relations_rejected(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)])
        with pytest.raises(InputError, match="cycle"):
            HcppInstance(g, ({("a", "b")}, {("b", "c")}), frozenset({(1, 2), (2, 1)}))

    def test_total_partial_order_counts_as_linear(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("c", "a", 1)])
        inst = HcppInstance(g, ({("a", "b")}, {("b", "c")}, {("a", "c")}), frozenset({(1, 2), (2, 3)}))
        assert inst.is_linear
        assert inst.predecessors(3) == {1, 2}
        inst2 = HcppInstance(g, ({("a", "b")}, {("b", "c")}, {("a", "c")}), frozenset({(1, 2)}))
        assert not inst2.is_linear


class TestValidateWalk:
    def test_single_class_accepts_any_cover(self):
        inst = eulerian_square()
        assert validate_walk(inst, Walk("abcda"))
        assert validate_walk(inst, Walk("adcbabcda"))

    def test_toy_tour(self, toy):
        assert validate_walk(toy, Walk("abdcbea")).accepted
        assert validate_walk(toy, Walk("abcdbea")).accepted

    def test_precedence_violation(self, toy):
        # b-e belongs to class 3 and is used before class 2 is finished
        v = validate_walk(toy, Walk("abebdcbea"))
        assert not v.accepted and v.classes == (2, 3)

    def test_missing_edge_and_open_walk(self, toy):
        assert "never traversed" in validate_walk(toy, Walk("abea")).reason
        assert "not closed" in validate_walk(toy, Walk("abdcbe")).reason

    def test_unknown_edge(self, toy):
        with pytest.raises(InputError):
            validate_walk(toy, Walk("acba"))

    def test_partial_order(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
        inst = HcppInstance(g, ({("a", "b")}, {("b", "c")}, {("a", "c")}), frozenset({(1, 2)}))
        assert validate_walk(inst, Walk("acbca")).accepted is False
        assert validate_walk(inst, Walk("abca")).accepted
        # class 3 is incomparable: may go first
        assert validate_walk(inst, Walk("acabca")).accepted


class TestToyPipeline:
    def test_layers(self, toy):
        assert layer_vertex_sets(toy) == (("a", "b"), ("b",), ("a", "b"), ("a", "b"))

    @pytest.mark.parametrize("sub", ["exact_connected", "exact_oracle", "approx"])
    def test_arcs(self, toy, sub):
        dag = build_layered_dag(toy, sub)
        assert dag.arc_weights() == TOY_ARCS
        for (i, u, v), arc in dag.arcs.items():
            assert arc.walk.start == u and arc.walk.end == v

    def test_best_path_and_assembly(self, toy):
        dag = build_layered_dag(toy)
        path = best_layer_path(dag)
        # a->a: 2+10+5 = 17, a->b->b->a: 2+8+3 = 13; b->b: 4+10+3 or 4+8+5 = 17
        assert path == LayerPath(("a", "b", "b", "a"), 13)
        walk = assemble_walk(dag, path)
        assert walk.closed and walk.start == "a"
        assert walk.weight(toy.graph) == 13
        assert validate_walk(toy, walk)

    def test_stats(self, toy):
        sol = solve_hcppl(toy, "exact_connected")
        assert (sol.stats.k, sol.stats.n, sol.stats.m, sol.stats.c) == (3, 5, 6, 1)
        assert sol.stats.arc_count == 8 and sol.stats.max_weight == 4
        assert sol.stats.failure_probability == 0 and sol.stats.alpha == 1
        approx = solve_hcppl(toy, "approx")
        assert approx.stats.alpha == Fraction(5, 3)
        assert all(s % 2 == 0 for s in approx.stats.parity_sizes)

    def test_feasible(self, toy):
        assert check_feasibility(toy)

    def test_threads_do_not_change_output(self, toy):
        for mode in ("approx", "exact_connected", "exact_oracle"):
            a = build_layered_dag(toy, mode, threads=1)
            b = build_layered_dag(toy, mode, threads=4)
            assert a.arcs == b.arcs


class TestLayerPathEdgeCases:
    def test_single_arc(self):
        dag = LayeredDag((("u",), ("u",)), {(1, "u", "u"): Arc(7, Walk("uvu"))}, "connected")
        assert best_layer_path(dag) == LayerPath(("u", "u"), 7)

    def test_no_arcs(self):
        assert best_layer_path(LayeredDag((("u",), ("u",)), {}, "connected")) is None

    def test_ties_break_lexicographically(self):
        arcs = {(1, "a", "a"): Arc(1, Walk("a")), (1, "a", "b"): Arc(1, Walk("a")),
                (2, "a", "a"): Arc(1, Walk("a")), (2, "b", "a"): Arc(1, Walk("a"))}
        dag = LayeredDag((("a",), ("a", "b"), ("a",)), arcs, "connected")
        assert best_layer_path(dag).vertices == ("a", "a", "a")


class TestSolve:
    def test_eulerian_single_class(self):
        inst = eulerian_square()
        for mode in ("approx", "exact_connected", "exact_oracle"):
            assert solve_hcppl(inst, mode).weight == 10

    def test_k1_path_doubles(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)])
        sol = solve_hcppl(HcppInstance(g, (frozenset(g.edges),)), "exact_connected")
        assert sol.weight == 4 and sol.walk.closed

    def test_partial_order_is_rejected(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
        inst = HcppInstance(g, ({("a", "b")}, {("b", "c")}, {("a", "c")}), frozenset({(1, 2)}))
        with pytest.raises(PreconditionError, match="NP-hard"):
            solve_hcppl(inst)

    def test_mode_preconditions_name_the_class(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("c", "d", 1)])
        inst = HcppInstance(g, ({("b", "c")}, {("a", "b"), ("c", "d")}))
        with pytest.raises(PreconditionError, match="class 2"):
            solve_hcppl(inst, "exact_connected")
        with pytest.raises(SizeLimitError, match="class 2"):
            solve_hcppl(inst, "exact_oracle", oracle_limit=1)
        with pytest.raises(InputError):
            solve_hcppl(inst, "fast")

    def test_infeasible_when_class_detached(self):
        # class 2 = c-d, reachable from class 1 only through class 3
        g = WeightedGraph.from_edges([("a", "b", 1), ("c", "d", 1), ("b", "c", 1)])
        inst = HcppInstance(g, ({("a", "b")}, {("c", "d")}, {("b", "c")}))
        assert not check_feasibility(inst)
        with pytest.raises(InfeasibleError):
            solve_hcppl(inst)

    def test_component_stats(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("c", "d", 5)])
        inst = HcppInstance(g, ({("b", "c")}, {("a", "b"), ("c", "d")}))
        st = class_component_stats(inst)
        assert st.per_class == (1, 2) and st.c == 2 and st.max_weight == 5


def _random_instances(seed, count, **kw):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, 7)
        m = rng.randint(n - 1, min(9, n * (n - 1) // 2))
        k = rng.randint(1, min(3, m))
        inst, _ = random_hcpp(rng, n, m, k, max_weight=6, **kw)
        if max(map(len, inst.classes)) <= 5 and check_feasibility(inst):
            out.append(inst)
    return out


def test_exact_modes_match_state_space_search():
    for inst in _random_instances(101, 60):
        opt = brute_hcpp_weight(inst)
        sol = solve_hcppl(inst, "exact_oracle")
        assert sol.weight == opt
        assert validate_walk(inst, sol.walk)
        if class_component_stats(inst).c == 1:
            assert solve_hcppl(inst, "exact_connected").weight == opt


def test_connected_classes_match_state_space_search():
    for inst in _random_instances(102, 40, components_per_class=1):
        assert solve_hcppl(inst, "exact_connected").weight == brute_hcpp_weight(inst)


def test_approx_dominates_exact_arcwise():
    for inst in _random_instances(103, 60):
        ex = build_layered_dag(inst, "exact_oracle")
        ap = build_layered_dag(inst, "approx")
        assert set(ex.arcs) == set(ap.arcs)
        for key, arc in ap.arcs.items():
            assert ex.arcs[key].weight <= arc.weight <= Fraction(5, 3) * ex.arcs[key].weight


def test_assembled_weight_equals_path_weight():
    for inst in _random_instances(104, 80):
        for mode in ("approx", "exact_oracle"):
            sol = solve_hcppl(inst, mode)
            assert sol.walk.weight(inst.graph) == sol.layer_path.weight == sol.weight
            assert validate_walk(inst, sol.walk)


def test_feasibility_agrees_with_solver():
    rng = random.Random(105)
    for _ in range(150):
        n = rng.randint(2, 7)
        m = rng.randint(n - 1, min(9, n * (n - 1) // 2))
        k = rng.randint(1, min(4, m))
        inst, _ = random_hcpp(rng, n, m, k)
        try:
            solve_hcppl(inst, "exact_oracle", oracle_limit=None)
            solved = True
        except InfeasibleError:
            solved = False
        assert solved == check_feasibility(inst)
        assert solved == (brute_hcpp_weight(inst) is not None)


def test_no_random_feasible_walk_beats_the_optimum(toy):
    rng = random.Random(106)
    opt = solve_hcppl(toy, "exact_oracle").weight
    g = toy.graph
    found = 0
    for _ in range(10_000):
        v = rng.choice(g.vertices)
        seq = [v]
        for _ in range(rng.randint(6, 12)):
            seq.append(rng.choice(g.neighbors(seq[-1]))[0])
            if seq[-1] == seq[0] and validate_walk(toy, Walk(seq)):
                found += 1
                assert Walk(seq).weight(g) >= opt
                break
    assert found > 0


def test_random_connected_graph_fixture_is_connected():
    rng = random.Random(1)
    g = random_connected_graph(rng, 9, 8)
    assert len(g.edges) == 8

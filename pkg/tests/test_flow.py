import io
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import diamond, shared_edge_graph
from leocap.flow import (
    SUPER_SINK,
    SUPER_SOURCE,
    attach_super_terminals,
    check_flow,
    dinic_max_flow,
    infinity_sentinel,
    sequential_multicommodity,
)
from leocap.graph import INF, CapacityGraph, read_edge_list, write_edge_list
from oracles import max_flow_by_enumeration, min_cut_value, sequential_values


def as_dict(g):
    return {(a.src, a.dst): a.capacity for a in g.arcs()}


@st.composite
def small_graphs(draw, max_nodes=8, max_cap=5):
    n = draw(st.integers(2, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 20)))
    g = CapacityGraph()
    for i in range(n):
        g.add_node(i)
    for u, v in chosen:
        g.add_arc(u, v, draw(st.integers(1, max_cap)))
    return g


class TestGraph:
    def test_rejects_self_loop_and_negative(self):
        g = CapacityGraph()
        with pytest.raises(ValueError):
            g.add_arc(1, 1, 5)
        with pytest.raises(ValueError):
            g.add_arc(1, 2, -1)

    def test_edges_unique(self):
        g = CapacityGraph()
        g.add_edge(1, 2, 5)
        g.add_arc(2, 3, 1)
        assert g.edges() == [(1, 2), (2, 3)]

    def test_edge_list_round_trip(self):
        g = diamond()
        g.add_arc("b", "s", INF, 12.5)
        buf = io.StringIO()
        write_edge_list(g, buf, header="toy")
        buf.seek(0)
        h = read_edge_list(buf)
        assert as_dict(h) == as_dict(g)
        assert h.length("b", "s") == 12.5

    def test_edge_list_parsing(self):
        text = "# comment\n0 1 10\n1 2 inf 3.5  # trailing\n\n"
        g = read_edge_list(io.StringIO(text))
        assert g.capacity(0, 1) == 10 and math.isinf(g.capacity(1, 2))
        assert g.length(1, 2) == 3.5

    @pytest.mark.parametrize("text", ["0 1\n", "0 1 x\n", "0 1 2 3 4\n"])
    def test_edge_list_errors(self, text):
        with pytest.raises(ValueError):
            read_edge_list(io.StringIO(text))


class TestDinic:
    def test_single_edge(self):
        g = CapacityGraph()
        g.add_arc("s", "t", 10)
        assert dinic_max_flow(g, "s", "t").value == 10

    def test_diamond(self):
        g = diamond()
        assert dinic_max_flow(g, "s", "t").value == 20
        assert max_flow_by_enumeration(g.nodes, as_dict(g), "s", "t") == 20

    def test_disconnected_is_zero(self):
        g = CapacityGraph()
        g.add_arc("s", "a", 3)
        g.add_node("t")
        r = dinic_max_flow(g, "s", "t")
        assert r.value == 0 and not r.flows

    def test_errors(self):
        g = diamond()
        with pytest.raises(ValueError):
            dinic_max_flow(g, "s", "s")
        with pytest.raises(KeyError):
            dinic_max_flow(g, "s", "zz")

    def test_infinite_path_is_unbounded(self):
        g = CapacityGraph()
        g.add_arc("s", "m", INF)
        g.add_arc("m", "t", INF)
        g.add_arc("s", "t", 4)
        r = dinic_max_flow(g, "s", "t")
        assert r.unbounded
        assert r.sentinel == infinity_sentinel(g) == 5

    def test_flow_leaves_the_routes(self):
        # unconstrained max-flow detours A-X-B-Y-C around the shared link
        g = shared_edge_graph(10)
        r = dinic_max_flow(g, "A", "C")
        assert r.value == 20
        assert r.flow("X", "B") == 10

    @settings(max_examples=150, deadline=None)
    @given(g=small_graphs())
    def test_matches_min_cut(self, g):
        s, t = g.nodes[0], g.nodes[-1]
        r = dinic_max_flow(g, s, t)
        assert r.value == pytest.approx(min_cut_value(g.nodes, as_dict(g), s, t), abs=1e-9)
        check_flow(g, r.flows, {s, t})

    def test_random_instances_against_min_cut(self):
        rng = random.Random(2024)
        for _ in range(100):
            n = rng.randint(2, 8)
            g = CapacityGraph()
            for i in range(n):
                g.add_node(i)
            for u in range(n):
                for v in range(n):
                    if u != v and rng.random() < 0.35:
                        g.add_arc(u, v, rng.randint(1, 5))
            r = dinic_max_flow(g, 0, n - 1)
            assert r.value == min_cut_value(g.nodes, as_dict(g), 0, n - 1)


class TestCheckFlow:
    def test_accepts_valid(self):
        g = diamond()
        check_flow(g, dinic_max_flow(g, "s", "t").flows, {"s", "t"})

    def test_rejects_overload(self):
        with pytest.raises(AssertionError):
            check_flow(diamond(), {("a", "b"): 6}, {"s", "t"})

    def test_rejects_imbalance(self):
        with pytest.raises(AssertionError):
            check_flow(diamond(), {("s", "a"): 3, ("a", "t"): 2}, {"s", "t"})


class TestSuperTerminals:
    def test_disjoint(self):
        g = diamond()
        for prune in (False, True):
            gx, vs, vt = attach_super_terminals(g, ["s"], ["t"], prune)
            assert gx.n_arcs == g.n_arcs + 2
            assert math.isinf(gx.capacity(vs, "s")) and math.isinf(gx.capacity("t", vt))
            assert dinic_max_flow(gx, vs, vt).value == 20

    def test_overlap_without_pruning_is_unbounded(self):
        g = shared_edge_graph(10)
        gx, vs, vt = attach_super_terminals(g, ["A", "B"], ["B", "C"])
        assert gx.has_arc(SUPER_SOURCE, "B") and gx.has_arc("B", SUPER_SINK)
        assert dinic_max_flow(gx, vs, vt).unbounded

    def test_overlap_with_pruning_keeps_first_role(self):
        g = shared_edge_graph(10)
        # B appears as a sink of the first pair before it is a source of the second
        gx, vs, vt = attach_super_terminals(g, ["A", "B"], ["B", "C"], prune_shortcuts=True)
        assert gx.has_arc("B", SUPER_SINK) and not gx.has_arc(SUPER_SOURCE, "B")
        r = dinic_max_flow(gx, vs, vt)
        assert not r.unbounded
        finite = {k: (r.sentinel if math.isinf(c) else c) for k, c in as_dict(gx).items()}
        assert r.value == min_cut_value(gx.nodes, finite, vs, vt)

    def test_first_occurrence_as_source(self):
        g = shared_edge_graph(10)
        gx, _, _ = attach_super_terminals(g, ["B", "A"], ["C", "B"], prune_shortcuts=True)
        assert gx.has_arc(SUPER_SOURCE, "B") and not gx.has_arc("B", SUPER_SINK)

    def test_errors(self):
        g = diamond()
        with pytest.raises(ValueError):
            attach_super_terminals(g, [], ["t"])
        with pytest.raises(KeyError):
            attach_super_terminals(g, ["s"], ["q"])
        gx, _, _ = attach_super_terminals(g, ["s"], ["t"])
        with pytest.raises(ValueError):
            attach_super_terminals(gx, ["s"], ["t"])


class TestSequential:
    def test_demand_met(self):
        (r,) = sequential_multicommodity(diamond(), [("s", "t", 7)])
        assert r.value == 7
        check_flow(diamond(), r.flows, {"s", "t"})

    def test_greedy_order_dependence(self):
        g = CapacityGraph()
        g.add_arc("a", "m", 10)
        g.add_arc("b", "m", 10)
        g.add_arc("m", "n", 5)
        g.add_arc("n", "x", 10)
        g.add_arc("n", "y", 10)
        r1, r2 = sequential_multicommodity(g, [("a", "x", 5), ("b", "y", 5)])
        assert (r1.value, r2.value) == (5, 0)

    def test_matches_exhaustive_oracle(self):
        g = CapacityGraph()
        for u, v, c in [(0, 1, 3), (0, 2, 2), (1, 2, 1), (1, 3, 2), (2, 3, 3), (3, 4, 2), (2, 4, 1)]:
            g.add_arc(u, v, c)
        commodities = [(0, 3, 3), (1, 4, 2), (0, 4, 3)]
        got = tuple(r.value for r in sequential_multicommodity(g, commodities))
        allowed = sequential_values(g.nodes, as_dict(g), commodities)
        assert got in allowed

    def test_residual_respected(self):
        g = diamond()
        rs = sequential_multicommodity(g, [("s", "t", 12), ("a", "t", 10), ("s", "b", 10)])
        total: dict = {}
        for r in rs:
            for k, f in r.flows.items():
                total[k] = total.get(k, 0.0) + f
        for k, f in total.items():
            assert f <= g.capacity(*k) + 1e-9
        assert rs[0].value == 12

    def test_errors(self):
        with pytest.raises(ValueError):
            sequential_multicommodity(diamond(), [])
        with pytest.raises(ValueError):
            sequential_multicommodity(diamond(), [("s", "t", -1)])

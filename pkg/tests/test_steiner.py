import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lossy_kernels.framework import INF
from lossy_kernels.generators import steiner_grid, weighted_connected
from lossy_kernels.graph import MultiGraph
from lossy_kernels.oracles import exact_steiner
from lossy_kernels.steiner import (
    CapExceeded,
    SteinerInstance,
    dreyfus_wagner,
    metric_closure,
    st_value,
    steiner_kernelize,
    steiner_tree_cost,
    subset_size_for,
    weight_budget,
)


def weighted(n, edges):
    return MultiGraph.from_edges(range(n), edges, weighted=True)


def spider(legs=4):
    return weighted(legs + 1, [(0, i, 1) for i in range(1, legs + 1)])


def test_two_terminals_on_a_path():
    g = weighted(3, [(0, 1, 1), (1, 2, 1)])
    inst = SteinerInstance(g, frozenset({0, 2}))
    ko = steiner_kernelize(inst, None, 0.5)
    red = ko.reduced.payload.graph
    # the geodesic survives as one closure edge and is expanded on lifting
    assert red.has_edge(0, 2)
    tree = dreyfus_wagner(red, ko.reduced.payload.terminals)[1]
    lifted = ko.lift(tree)
    assert sorted(lifted) == [(0, 1), (1, 2)]
    assert st_value(inst, 2, lifted) == 2


def test_all_vertices_terminals_gives_spanning_tree():
    rng = random.Random(3)
    inst = weighted_connected(7, 0.4, 7, rng)
    ko = steiner_kernelize(inst, None, 0.5)
    red = ko.reduced.payload
    assert red.graph.vertices == inst.terminals
    h = nx.Graph()
    h.add_weighted_edges_from((u, v, inst.graph.weight(u, v)) for u, v in inst.graph.edges())
    mst = sum(d["weight"] for _, _, d in nx.minimum_spanning_edges(h, data=True))
    tree = dreyfus_wagner(red.graph, red.terminals)[1]
    assert st_value(inst, 7, ko.lift(tree)) == mst


def test_spider_keeps_its_centre():
    inst = SteinerInstance(spider(), frozenset(range(1, 5)))
    ko = steiner_kernelize(inst, None, 1.0)
    assert 0 in ko.info["kernel"].kept
    tree = dreyfus_wagner(ko.reduced.payload.graph, ko.reduced.payload.terminals)[1]
    assert st_value(inst, 4, ko.lift(tree)) == 4


def test_dreyfus_wagner_base_cases():
    g = weighted(4, [(0, 1, 2), (1, 2, 2), (0, 2, 5), (2, 3, 1)])
    assert dreyfus_wagner(g, [2]) == (0, [])
    assert dreyfus_wagner(g, [0, 2])[0] == 4
    assert dreyfus_wagner(spider(), range(1, 5))[0] == 4


def test_tree_cost_checks_feasibility():
    g = weighted(3, [(0, 1, 1), (1, 2, 1)])
    assert steiner_tree_cost(g, {0, 2}, [(0, 1)]) == INF
    assert steiner_tree_cost(g, {0, 2}, [(0, 1), (1, 2)]) == 2
    assert steiner_tree_cost(g, {0, 2}, [(0, 2)]) == INF


def test_subset_size_and_budget():
    assert subset_size_for(1) == 4
    assert subset_size_for(0.5) == 16
    assert weight_budget(4, 0.5) == 192


def test_terminal_cap():
    inst = SteinerInstance(spider(6), frozenset(range(1, 7)))
    with pytest.raises(CapExceeded):
        steiner_kernelize(inst, None, 0.5, cap=4)


def test_disconnected_terminals_rejected():
    inst = SteinerInstance(weighted(4, [(0, 1, 1), (2, 3, 1)]), frozenset({0, 3}))
    with pytest.raises(ValueError):
        steiner_kernelize(inst, None, 0.5)


def test_free_terminal_tree():
    inst = SteinerInstance(weighted(3, [(0, 1, 0), (1, 2, 0)]), frozenset({0, 2}))
    ko = steiner_kernelize(inst, None, 0.5)
    tree = dreyfus_wagner(ko.reduced.payload.graph, ko.reduced.payload.terminals)[1]
    assert st_value(inst, 2, ko.lift(tree)) == 0


def test_invalid_reduced_tree_still_lifts():
    inst = SteinerInstance(spider(), frozenset(range(1, 5)))
    ko = steiner_kernelize(inst, None, 1.0)
    assert st_value(inst, 4, ko.lift([])) < INF


instances = st.integers(0, 10**6).map(
    lambda s: (lambda rng: steiner_grid(rng.randint(2, 3), rng.randint(2, 4), rng.randint(1, 5), rng)
               if s % 2 else weighted_connected(rng.randint(2, 12), 0.3, rng.randint(1, 5), rng))(random.Random(s))
)


@given(instances)
def test_dreyfus_wagner_matches_brute_force(inst):
    cost, edges = dreyfus_wagner(inst.graph, inst.terminals)
    assert cost == exact_steiner(inst.graph, inst.terminals)[0]
    assert steiner_tree_cost(inst.graph, inst.terminals, edges) == cost


@given(instances, st.sampled_from([0.5, 1.0]))
def test_kernel_guarantee_and_rounding(inst, eps):
    ko = steiner_kernelize(inst, None, eps)
    ker = ko.info["kernel"]
    red = ko.reduced.payload
    assert ko.transcript.replay().canonical() == red.graph.canonical()
    opt = dreyfus_wagner(inst.graph, inst.terminals)[0]
    lifted = ko.lift(dreyfus_wagner(red.graph, red.terminals)[1])
    assert st_value(inst, len(inst.terminals), lifted) <= (1 + Fraction(repr(eps))) * opt
    dist = metric_closure(inst.graph).dist
    for (u, v), rounded in red.graph.weights.items():
        assert rounded <= weight_budget(len(inst.terminals), eps)
        if ker.scale is not None:
            assert rounded <= dist[u][v] * ker.scale
            assert dist[u][v] <= (rounded + 1) / ker.scale

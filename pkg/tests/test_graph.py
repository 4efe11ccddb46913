import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satdisco.bruteforce import enumerate_graphs, walks_dconnect
from satdisco.graph import (
    Experiment,
    MixedGraph,
    Relation,
    TestSpec,
    d_connected,
    iter_specs,
    manipulate,
    max_path_length,
    oracle_relations,
    passive_experiment,
    random_experiments,
    random_graph,
)


def spec(g, x, y, cond=(), interv=()):
    return TestSpec(g.index(x), g.index(y), frozenset(map(g.index, cond)), frozenset(map(g.index, interv)))


def test_collider_blocks_marginally_and_opens_when_conditioned(collider_graph):
    assert not d_connected(collider_graph, spec(collider_graph, "x", "y"))
    assert d_connected(collider_graph, spec(collider_graph, "x", "y", ["z"]))
    # conditioning on a descendant of the collider opens it as well
    assert d_connected(collider_graph, spec(collider_graph, "x", "y", ["w"]))


def test_chain_blocked_by_middle_node(collider_graph):
    assert d_connected(collider_graph, spec(collider_graph, "x", "w"))
    assert not d_connected(collider_graph, spec(collider_graph, "x", "w", ["z"]))


def test_intervention_cuts_incoming_edges(collider_graph):
    assert not d_connected(collider_graph, spec(collider_graph, "x", "z", interv=["z"]))
    # intervening on the cause keeps its outgoing edge
    assert d_connected(collider_graph, spec(collider_graph, "x", "z", interv=["x"]))


def test_manipulate_drops_arrowheads_only():
    g = MixedGraph.from_edges("a b c".split(), [("a", "b"), ("b", "c")], [("a", "c")])
    h = manipulate(g, [2])
    assert h.directed == frozenset({(0, 1)})
    assert h.bidirected == frozenset()


def test_bidirected_edge_connects():
    g = MixedGraph.from_edges("a b".split(), [], [("a", "b")])
    assert d_connected(g, TestSpec(0, 1, frozenset(), frozenset()))
    assert not d_connected(g, TestSpec(0, 1, frozenset(), frozenset({0})))


def test_cycle_connects_through_collider_descendant():
    # a -> b <- c, b -> d -> b: conditioning on d opens the collider at b
    g = MixedGraph.from_edges("a b c d".split(), [("a", "b"), ("c", "b"), ("b", "d"), ("d", "b")])
    assert not d_connected(g, TestSpec(0, 2, frozenset(), frozenset()))
    assert d_connected(g, TestSpec(0, 2, frozenset({3}), frozenset()))


def test_graph_validation():
    with pytest.raises(ValueError):
        MixedGraph(("a", "a"), frozenset(), frozenset())
    with pytest.raises(ValueError):
        MixedGraph(("a", "b"), frozenset({(0, 0)}), frozenset())


def test_testspec_normalises_and_rejects_overlap():
    t = TestSpec(2, 0, frozenset({1}), frozenset())
    assert (t.x, t.y) == (0, 2)
    with pytest.raises(ValueError):
        TestSpec(0, 1, frozenset({0}), frozenset())


def test_iter_specs_counts():
    e = passive_experiment(4)
    assert len(list(iter_specs([e], size=0))) == 6
    assert len(list(iter_specs([e], size=1))) == 12
    assert len(list(iter_specs([e, e], size=1))) == 12


def test_max_path_length_values():
    t = TestSpec(0, 1, frozenset(), frozenset())
    assert max_path_length(2, t) == 1
    assert max_path_length(3, t) == 2
    assert max_path_length(6, t) == 8
    t = TestSpec(0, 1, frozenset({2, 3}), frozenset({4}))
    assert max_path_length(6, t) == 6


def test_random_generators_are_seeded():
    a = random_graph(6, 0.3, random.Random(5))
    b = random_graph(6, 0.3, random.Random(5))
    assert a == b
    ea = random_experiments(6, 4, random.Random(1))
    eb = random_experiments(6, 4, random.Random(1))
    assert ea == eb
    assert all(e.intervened <= e.observed for e in ea)


def test_oracle_relations_sorted_and_consistent(collider_graph):
    rels = oracle_relations(collider_graph, [passive_experiment(4)])
    keys = [r.spec.sort_key() for r in rels]
    assert keys == sorted(keys)
    assert Relation.sep(0, 1) in rels


def test_acyclicity_and_ancestors():
    g = MixedGraph.from_edges("a b c".split(), [("a", "b"), ("b", "c")])
    assert g.is_acyclic()
    assert g.ancestors_of(2) == {0, 1}
    assert not MixedGraph.from_edges("a b".split(), [("a", "b"), ("b", "a")]).is_acyclic()


@st.composite
def graph_and_spec(draw, max_n=5):
    n = draw(st.integers(2, max_n))
    directed = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])))
    bidirected = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] < p[1])))
    g = MixedGraph(tuple(f"v{i}" for i in range(n)), frozenset(directed), frozenset(bidirected))
    x, y = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    rest = [v for v in range(n) if v not in (x, y)]
    cond = draw(st.sets(st.sampled_from(rest))) if rest else set()
    interv = draw(st.sets(st.integers(0, n - 1)))
    return g, TestSpec(x, y, frozenset(cond), frozenset(interv))


@settings(max_examples=300, deadline=None)
@given(graph_and_spec())
def test_reachability_agrees_with_literal_walks(case):
    g, t = case
    assert d_connected(g, t) == walks_dconnect(g, t, max_path_length(g.n, t))


@settings(max_examples=200, deadline=None)
@given(graph_and_spec())
def test_d_connection_symmetric(case):
    g, t = case
    swapped = TestSpec(t.y, t.x, t.cond, t.interv)
    assert d_connected(g, t) == d_connected(g, swapped)


@settings(max_examples=200, deadline=None)
@given(graph_and_spec())
def test_adding_an_edge_never_separates_marginally(case):
    g, t = case
    t = TestSpec(t.x, t.y, frozenset(), t.interv)
    if not d_connected(g, t):
        return
    for a, b in itertools.permutations(range(g.n), 2):
        bigger = MixedGraph(g.names, g.directed | {(a, b)}, g.bidirected)
        assert d_connected(bigger, t)


def test_literal_walks_match_reachability_exhaustively_on_two_nodes():
    for g in enumerate_graphs(2):
        for interv in ([], [0], [1], [0, 1]):
            t = TestSpec(0, 1, frozenset(), frozenset(interv))
            assert d_connected(g, t) == walks_dconnect(g, t, 1, memo=False)

import random

import numpy as np
import pytest

from satdisco.bruteforce import (
    all_specs,
    bits_of,
    consensus,
    enumerate_graphs,
    graph_from_bits,
    graph_space,
    walks_dconnect,
)
from satdisco.discovery import Contradiction, Status
from satdisco.graph import MixedGraph, Relation, TestSpec, d_connected, max_path_length


def test_graph_counts():
    assert sum(1 for _ in enumerate_graphs(2)) == 8
    assert sum(1 for _ in enumerate_graphs(3)) == 512
    assert len(graph_space(4)) == 262144
    with pytest.raises(ValueError):
        next(enumerate_graphs(5))


def test_bits_round_trip():
    for bits in range(0, 512, 37):
        assert bits_of(graph_from_bits(3, bits)) == bits


def test_conditioned_descendant_needs_length_four_walk(collider_graph):
    t = TestSpec(0, 1, frozenset({3}), frozenset())
    assert walks_dconnect(collider_graph, t, 4, memo=False)
    assert not walks_dconnect(collider_graph, t, 3, memo=False)


def test_empty_graph_never_connects():
    g = MixedGraph.empty(3)
    assert not any(walks_dconnect(g, t, 4) for t in all_specs(3))


def test_memo_agrees_with_literal_enumeration():
    rng = random.Random(1)
    for _ in range(40):
        bits = rng.randrange(1 << 18)
        g = graph_from_bits(4, bits)
        for t in rng.sample(all_specs(4), 10):
            cap = max_path_length(4, t)
            assert walks_dconnect(g, t, cap) == walks_dconnect(g, t, cap, memo=False)


def test_vectorised_connection_matches_scalar():
    space = graph_space(3)
    for t in all_specs(3)[::5]:
        vec = space.connected(t)
        for bits in range(0, 512, 17):
            assert vec[bits] == d_connected(graph_from_bits(3, bits), t)


def test_ancestor_matrix_matches_graphs():
    space = graph_space(3)
    rows = np.arange(0, 512, 7)
    anc = space.ancestor_matrix(rows)
    for k, bits in enumerate(rows):
        g = graph_from_bits(3, int(bits))
        for x in range(3):
            for y in range(3):
                if x != y:
                    assert anc[x][y][k] == g.is_ancestor(x, y)


def test_consensus_examples():
    sol = consensus([Relation.sep(0, 1)], 2)
    assert {st for _, _, st in sol.items()} == {Status.ABSENT}
    sol = consensus([], 2)
    assert {st for _, _, st in sol.items()} == {Status.UNKNOWN}
    with pytest.raises(Contradiction):
        consensus([Relation.sep(0, 1), Relation.con(0, 1)], 2)


def test_consensus_assumptions_restrict_space():
    sol = consensus([], 2, acyclic=True, no_latents=True)
    assert sol.bidirected[(0, 1)] == Status.ABSENT
    assert sol.directed[(0, 1)] == Status.UNKNOWN

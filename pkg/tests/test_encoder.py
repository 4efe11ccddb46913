import json
import math
import random

import pytest

from satdisco.bruteforce import all_specs, enumerate_graphs
from satdisco.encoder import (
    BackgroundConstraint,
    Encoder,
    assignment_of,
    dump_state,
    load_state,
    satisfies,
)
from satdisco.graph import (
    MixedGraph,
    Relation,
    TestSpec,
    d_connected,
    oracle_relations,
    passive_experiment,
    random_graph,
)
from satdisco.sat import backbone, make_backend


def surviving_graphs(enc, n):
    """Graphs on n nodes whose edge assignment extends to a model of enc's formula."""
    out = []
    solver = make_backend("embedded", enc.formula.clauses)
    for g in enumerate_graphs(n):
        assum = [enc.dir_var(x, y) if g.has_directed(x, y) else -enc.dir_var(x, y) for x, y in enc.ordered_pairs()]
        assum += [enc.bidir_var(x, y) if g.has_bidirected(x, y) else -enc.bidir_var(x, y) for x, y in enc.unordered_pairs()]
        if solver.solve_under(assum).satisfiable:
            out.append(g)
    return out


def check_soundness(enc, g, specs):
    values = assignment_of(enc.table, g)
    assert satisfies(values, enc.formula.clauses)
    for t in specs:
        assert values[enc.relation_var(t)] == d_connected(g, t), (g, t)


def test_soundness_sampled_at_three_nodes():
    specs = all_specs(3)
    enc = Encoder(3)
    for t in specs:
        enc.relation_var(t)
    rng = random.Random(0)
    for g in rng.sample(list(enumerate_graphs(3)), 60):
        check_soundness(enc, g, specs)


def test_soundness_on_random_four_node_graphs():
    rng = random.Random(4)
    enc = Encoder(4)
    specs = rng.sample(all_specs(4), 60)
    for t in specs:
        enc.relation_var(t)
    for _ in range(30):
        check_soundness(enc, random_graph(4, 0.3, rng), specs)


def test_walk_through_conditioned_descendant(collider_graph):
    enc = Encoder(4)
    t = TestSpec(0, 1, frozenset({3}), frozenset())
    v = enc.relation_var(t)
    assert assignment_of(enc.table, collider_graph)[v]


def test_empty_graph_makes_everything_false():
    enc = Encoder(3)
    for t in all_specs(3):
        enc.relation_var(t)
    values = assignment_of(enc.table, MixedGraph.empty(3))
    for key, v in enc.table.items():
        if key[0] in ("dir", "bidir", "path", "rel"):
            assert not values[v], key


def test_separation_on_two_nodes_fixes_all_edges_absent():
    enc = Encoder(2)
    enc.encode_relation(Relation.sep(0, 1))
    b = make_backend("embedded", enc.formula.clauses)
    res = backbone(b, enc.edge_vars())
    assert res.fixed == {v: False for v in enc.edge_vars()}


def test_connection_under_intervention_needs_the_forward_edge():
    enc = Encoder(2)
    enc.encode_relation(Relation.con(0, 1, interv=[0]))
    graphs = surviving_graphs(enc, 2)
    assert graphs and all(g.has_directed(0, 1) for g in graphs)
    assert len(graphs) == 4


def test_fully_intervened_pair_has_no_connecting_path():
    enc = Encoder(2)
    b = make_backend("embedded")
    enc.formula.listeners.append(b.add_clauses)
    v = enc.relation_var(TestSpec(0, 1, frozenset(), frozenset({0, 1})))
    assert not b.solve_under([v]).satisfiable


def test_tail_path_of_length_one_forces_edge():
    enc = Encoder(2)
    b = make_backend("embedded")
    enc.formula.listeners.append(b.add_clauses)
    p = enc.path_var(0, 1, 1, 0, 1, frozenset(), frozenset())
    assert not b.solve_under([p, -enc.dir_var(0, 1)]).satisfiable
    assert b.solve_under([p]).satisfiable


def test_relation_encoding_is_idempotent(collider_graph):
    enc = Encoder(4)
    r = Relation.con(0, 3, cond=[2])
    enc.encode_relation(r)
    before = len(enc.formula)
    enc.encode_relation(r)
    assert len(enc.formula) - before <= 1
    before = len(enc.formula)
    enc.encode_context(frozenset({2}), frozenset(), 4)
    after_first = len(enc.formula)
    enc.encode_context(frozenset({2}), frozenset(), 4)
    assert len(enc.formula) == after_first >= before


def test_true_graph_satisfies_its_own_relations(collider_graph):
    enc = Encoder(4)
    for r in oracle_relations(collider_graph, [passive_experiment(4)]):
        enc.encode_relation(r)
    assert satisfies(assignment_of(enc.table, collider_graph), enc.formula.clauses)


def test_sufficiency_units():
    enc = Encoder(3)
    enc.constrain_sufficiency()
    assert sorted(enc.formula.clauses) == sorted((-enc.bidir_var(x, y),) for x, y in enc.unordered_pairs())


def test_acyclicity_models_are_exactly_acyclic_graphs():
    enc = Encoder(3)
    enc.constrain_acyclicity()
    enc.encode_relation(Relation.con(0, 1))
    got = {(g.directed, g.bidirected) for g in surviving_graphs(enc, 3)}
    want = {
        (g.directed, g.bidirected)
        for g in enumerate_graphs(3)
        if g.is_acyclic() and d_connected(g, TestSpec(0, 1, frozenset(), frozenset()))
    }
    assert got == want


def test_two_cycle_violates_acyclicity():
    enc = Encoder(2)
    enc.constrain_acyclicity()
    g = MixedGraph.from_edges(["x", "y"], [("x", "y"), ("y", "x")])
    assert not satisfies(assignment_of(enc.table, g), enc.formula.clauses)


def test_ancestral_knowledge_selects_graphs_with_directed_path():
    enc = Encoder(3)
    enc.add_background(BackgroundConstraint("ancestral", 0, 2, True))
    got = {(g.directed, g.bidirected) for g in surviving_graphs(enc, 3)}
    want = {(g.directed, g.bidirected) for g in enumerate_graphs(3) if g.is_ancestor(0, 2)}
    assert got == want


def test_absent_ancestry_contradicts_interventional_connection():
    enc = Encoder(2)
    enc.add_background(BackgroundConstraint("ancestral", 0, 1, False))
    enc.encode_relation(Relation.con(0, 1, interv=[0]))
    assert not make_backend("embedded", enc.formula.clauses).solve_under([]).satisfiable


def test_edge_knowledge_is_a_unit_clause():
    enc = Encoder(3)
    enc.add_background(BackgroundConstraint("edge", 0, 1, True))
    enc.add_background(BackgroundConstraint("bidir", 1, 2, False))
    assert enc.formula.clauses == [(enc.dir_var(0, 1),), (-enc.bidir_var(1, 2),)]


def _has_directed_walk(g, stops, limit):
    """Directed walk visiting ``stops`` in order with at most ``limit`` edges."""
    succ = {v: [b for a, b in g.directed if a == v] for v in range(g.n)}
    total_reach = {(stops[0], 0)}
    for target in stops[1:]:
        frontier, nxt = set(total_reach), set()
        seen = set()
        while frontier:
            new = set()
            for v, used in frontier:
                if used >= limit:
                    continue
                for w in succ[v]:
                    state = (w, used + 1)
                    if state in seen:
                        continue
                    seen.add(state)
                    new.add(state)
                    if w == target:
                        nxt.add(state)
            frontier = new
        total_reach = nxt
    return bool(total_reach)


@pytest.mark.parametrize("waypoints,length", [((), None), ((1,), None), ((1,), 2), ((), 1), ((1,), 3)])
def test_path_knowledge_matches_directed_walks(waypoints, length):
    enc = Encoder(3)
    enc.add_background(BackgroundConstraint("path", 0, 2, True, waypoints, length))
    got = {(g.directed, g.bidirected) for g in surviving_graphs(enc, 3)}
    limit = length if length is not None else (len(waypoints) + 1) * 2
    stops = (0,) + tuple(waypoints) + (2,)
    want = {(g.directed, g.bidirected) for g in enumerate_graphs(3) if _has_directed_walk(g, stops, limit)}
    assert got == want


def test_path_knowledge_rejects_too_short_length():
    enc = Encoder(4)
    with pytest.raises(ValueError):
        enc.add_background(BackgroundConstraint("path", 0, 3, True, (1, 2), 2))


def test_saved_state_round_trips(collider_graph):
    enc = Encoder(4)
    for r in oracle_relations(collider_graph, [passive_experiment(4)], max_c=1):
        enc.encode_relation(r)
    state = json.loads(json.dumps(dump_state(enc, collider_graph.names)))
    enc2, names = load_state(state)
    assert names == collider_graph.names
    assert enc2.formula.clauses == enc.formula.clauses
    assert enc2.table.count == enc.table.count
    t = TestSpec(0, 3, frozenset({1}), frozenset())
    before = enc2.table.count
    assert enc2.relation_var(t) == enc.relation_var(t) or enc2.table.count > before
    check_soundness(enc2, collider_graph, [t])


def test_formula_growth_is_polynomial():
    sizes = {}
    for n in (9, 10):
        enc = Encoder(n)
        base = enc.formula.literal_count()
        enc.encode_relation(Relation.con(0, 1, cond=[2]))
        sizes[n] = enc.formula.literal_count() - base
    # local log-log slope of the per-relation literal count, tending to 3 from above
    slope = math.log(sizes[10] / sizes[9]) / math.log(10 / 9)
    assert slope < 4

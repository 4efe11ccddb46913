import random

import pytest

from satdisco.bruteforce import consensus
from satdisco.discovery import (
    Contradiction,
    DiscoveryConfig,
    EdgeSolution,
    Status,
    StatusConflict,
    open_relations,
    prune_tests,
    run_graph,
    run_relations,
)
from satdisco.encoder import BackgroundConstraint
from satdisco.experiments import truth_solution
from satdisco.graph import (
    Experiment,
    MixedGraph,
    Relation,
    TestSpec,
    iter_specs,
    oracle_relations,
    passive_experiment,
    random_experiments,
    random_graph,
)
from satdisco.query import ALWAYS_FALSE, ALWAYS_TRUE, CONTINGENT, query

P, A, U = Status.PRESENT, Status.ABSENT, Status.UNKNOWN


def statuses(sol):
    return list(sol.items())


def test_two_node_empty_truth_all_absent(backend_name):
    g = MixedGraph.empty(2)
    res = run_graph(g, [passive_experiment(2)], DiscoveryConfig(backend=backend_name))
    assert [st for kind, _, st in res.solution.items() if kind != "anc"] == [A, A, A]


def test_collider_graph_with_both_assumptions(collider_graph, backend_name):
    cfg = DiscoveryConfig(acyclic=True, no_latents=True, backend=backend_name)
    res = run_graph(collider_graph, [passive_experiment(4)], cfg)
    present = {(k, p) for k, p, st in res.solution.edge_items() if st == P}
    assert present == {("dir", (0, 2)), ("dir", (1, 2)), ("dir", (2, 3))}
    assert all(st != U for _, _, st in res.solution.edge_items())


@pytest.mark.parametrize("acyclic,no_latents", [(False, False), (True, False), (False, True), (True, True)])
def test_collider_graph_matches_consensus(collider_graph, acyclic, no_latents):
    exps = [passive_experiment(4)]
    res = run_graph(collider_graph, exps, DiscoveryConfig(acyclic=acyclic, no_latents=no_latents))
    ref = consensus(oracle_relations(collider_graph, exps), 4, acyclic, no_latents)
    assert statuses(res.solution) == statuses(ref)


def test_random_three_node_instances_match_consensus():
    rng = random.Random(8)
    for _ in range(25):
        g = random_graph(3, 0.35, rng)
        exps = random_experiments(3, 3, rng)
        res = run_graph(g, exps)
        assert statuses(res.solution) == statuses(consensus(oracle_relations(g, exps), 3))


def test_contradictory_list_raises():
    rels = [Relation.sep(0, 1), Relation.con(0, 1)]
    with pytest.raises(Contradiction):
        run_relations(rels, ["x", "y"])


def test_unsatisfiable_combination_raises():
    # a marginal connection between two nodes is impossible without edges
    know = [BackgroundConstraint("edge", 0, 1, False), BackgroundConstraint("edge", 1, 0, False),
            BackgroundConstraint("bidir", 0, 1, False)]
    with pytest.raises(Contradiction):
        run_relations([Relation.con(0, 1)], ["x", "y"], DiscoveryConfig(background=know))


def test_fixed_list_mode_reflects_only_given_relations():
    res = run_relations([Relation.sep(0, 1)], ["x", "y", "z"])
    sol = res.solution
    assert sol.directed[(0, 1)] == A and sol.directed[(1, 0)] == A and sol.bidirected[(0, 1)] == A
    assert sol.directed[(0, 2)] == U


def test_prune_examples():
    s = EdgeSolution.unknown(2)
    det, open_ = prune_tests(s, [TestSpec(0, 1, frozenset(), frozenset({0, 1}))])
    assert det == [Relation.sep(0, 1, interv=[0, 1])] and open_ == []
    det, open_ = prune_tests(s, [TestSpec(0, 1, frozenset(), frozenset())])
    assert det == [] and len(open_) == 1


def test_prune_with_fully_known_solution_leaves_nothing_open(collider_graph):
    s = truth_solution(collider_graph)
    specs = list(iter_specs([passive_experiment(4)]))
    det, open_ = prune_tests(s, specs, collider_graph.names)
    assert open_ == [] and len(det) == len(specs)


def test_status_never_flips():
    s = EdgeSolution.unknown(2)
    s.set("directed", (0, 1), P)
    s.set("directed", (0, 1), P)
    with pytest.raises(StatusConflict):
        s.set("directed", (0, 1), A)


def test_capped_run_is_a_sound_subset():
    rng = random.Random(21)
    for _ in range(6):
        g = random_graph(5, 0.25, rng)
        exps = random_experiments(5, 5, rng)
        full = run_graph(g, exps).solution.determinate()
        for c in (0, 1, 2):
            capped = run_graph(g, exps, DiscoveryConfig(max_c=c)).solution.determinate()
            assert all(full[k] == v for k, v in capped.items())


def test_run_is_deterministic():
    rng = random.Random(3)
    g = random_graph(5, 0.3, rng)
    exps = random_experiments(5, 4, rng)
    a = run_graph(g, exps, DiscoveryConfig(backend="embedded"))
    b = run_graph(g, exps, DiscoveryConfig(backend="embedded"))
    assert statuses(a.solution) == statuses(b.solution)
    assert a.encoded == b.encoded


def test_backends_agree_on_statuses():
    rng = random.Random(9)
    g = random_graph(4, 0.3, rng)
    exps = random_experiments(4, 3, rng)
    a = run_graph(g, exps, DiscoveryConfig(backend="embedded"))
    b = run_graph(g, exps, DiscoveryConfig(backend="minisat"))
    assert statuses(a.solution) == statuses(b.solution)


def test_backbone_filtering_does_not_change_result():
    rng = random.Random(12)
    g = random_graph(4, 0.3, rng)
    exps = random_experiments(4, 3, rng)
    a = run_graph(g, exps, DiscoveryConfig(backbone_filtering=True))
    b = run_graph(g, exps, DiscoveryConfig(backbone_filtering=False))
    assert statuses(a.solution) == statuses(b.solution)


def test_present_edge_implies_present_ancestry():
    rng = random.Random(5)
    for _ in range(5):
        g = random_graph(4, 0.3, rng)
        res = run_graph(g, random_experiments(4, 3, rng))
        for pair, st in res.solution.directed.items():
            if st == P:
                assert res.solution.ancestral[pair] == P


def test_no_open_relations_after_uncapped_run():
    rng = random.Random(14)
    for _ in range(4):
        g = random_graph(4, 0.3, rng)
        exps = random_experiments(4, 3, rng)
        res = run_graph(g, exps)
        assert open_relations(res, list(iter_specs(exps))) == []


def test_max_c_validation():
    with pytest.raises(ValueError):
        run_graph(MixedGraph.empty(3), [passive_experiment(3)], DiscoveryConfig(max_c=2))


def test_chain_queries(chain):
    res = run_graph(chain, [passive_experiment(3)])
    names = chain.names
    assert query(res.encoder, res.solver, "exactly(x->y, z->y)", names) == ALWAYS_FALSE
    assert query(res.encoder, res.solver, "exactly(y->x, z->y)", names) == CONTINGENT
    assert query(res.encoder, res.solver, "x->y | !x->y", names) == ALWAYS_TRUE

import math

import pytest

from satdisco.discovery import DiscoveryConfig, EdgeSolution, Status
from satdisco.experiments import (
    CATEGORIES,
    InstanceSpec,
    SoundnessError,
    check_sound,
    compatible,
    format_table,
    make_instance,
    measure,
    proportions,
    run_assumption_comparison,
    run_identifiability,
    run_scaling,
    truth_solution,
)
from satdisco.graph import MixedGraph, passive_experiment


def test_restriction_classes_hold():
    for seed in range(20):
        g, exps = make_instance(InstanceSpec(6, 0.4, 3, seed, "both"))
        assert g.is_acyclic() and not g.bidirected
        g, _ = make_instance(InstanceSpec(6, 0.4, 3, seed, "acyclic"))
        assert g.is_acyclic()
        g, _ = make_instance(InstanceSpec(6, 0.4, 3, seed, "no-latents"))
        assert not g.bidirected
        assert len(exps) == 3


def test_instances_are_reproducible():
    spec = InstanceSpec(5, seed=3)
    assert make_instance(spec) == make_instance(spec)


def test_invalid_restriction():
    with pytest.raises(ValueError):
        InstanceSpec(4, restriction="sparse")


def test_compatibility():
    assert compatible("both", "both") and compatible("none", "neither")
    assert not compatible("none", "acyclic") and not compatible("acyclic", "no-latents")


def test_empty_truth_is_fully_identified_at_level_zero():
    g = MixedGraph.empty(3)
    m = measure(g, [passive_experiment(3)], DiscoveryConfig(max_c=0))
    for cat in ("dir_absent", "bidir_absent", "anc_absent"):
        assert m.proportions[cat] == 1.0
    assert math.isnan(m.proportions["dir_present"])


def test_soundness_check_catches_wrong_status():
    g = MixedGraph.from_edges(["a", "b"], [("a", "b")])
    sol = truth_solution(g)
    check_sound(sol, g)
    sol.directed[(0, 1)] = Status.ABSENT
    with pytest.raises(SoundnessError):
        check_sound(sol, g)


def test_proportions_of_unknown_solution_are_zero():
    g = MixedGraph.from_edges(["a", "b", "c"], [("a", "b")], [("b", "c")])
    props = proportions(EdgeSolution.unknown(3), g)
    assert all(v == 0.0 for v in props.values() if not math.isnan(v))


def test_scaling_rows():
    rows = run_scaling([5], 3, max_c=2, seed=1)
    assert [r["variant"] for r in rows] == ["full", "max_c=2"]
    assert all(r["instances"] == 3 and r["timeouts"] == 0 for r in rows)


def test_scaling_timeout_is_recorded():
    rows = run_scaling([6], 1, max_c=None, seed=1, timeout=1e-3)
    assert rows[0]["timeouts"] == 1


def test_identifiability_is_monotone_per_instance():
    rows, per_instance = run_identifiability(5, 4, seed=2)
    assert [r["max_c"] for r in rows] == [0, 1, 2, 3]
    for inst in per_instance:
        for lo, hi in zip(inst, inst[1:]):
            for cat in CATEGORIES:
                if not math.isnan(lo[cat]):
                    assert hi[cat] >= lo[cat] - 1e-12


def test_assumption_comparison_rows():
    rows = run_assumption_comparison(4, 3, seed=0)
    pairs = {(r["truth"], r["assume"]) for r in rows}
    assert ("none", "neither") in pairs and ("none", "acyclic") not in pairs
    assert ("both", "both") in pairs and len(pairs) == 9
    text = format_table(rows)
    assert text.splitlines()[0].startswith("truth\tassume")

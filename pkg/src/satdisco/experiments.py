"""Simulation harness: runtime scaling, identifiability vs. conditioning cap,
and the effect of model-space assumptions."""
from __future__ import annotations

import math
import multiprocessing as mp
import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from satdisco.discovery import DiscoveryConfig, EdgeSolution, Status, run_graph
from satdisco.graph import Experiment, MixedGraph, random_experiments, random_graph

RESTRICTIONS = ("none", "acyclic", "no-latents", "both")
CATEGORIES = (
    "dir_present",
    "dir_absent",
    "bidir_present",
    "bidir_absent",
    "anc_present",
    "anc_absent",
)
# assumption sets as (acyclic, no_latents)
ASSUMPTION_SETS = {
    "neither": (False, False),
    "acyclic": (True, False),
    "no-latents": (False, True),
    "both": (True, True),
}


class SoundnessError(AssertionError):
    """A determinate status disagrees with the ground truth."""


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    edge_prob: float = 0.2
    n_experiments: int = 10
    seed: int = 0
    restriction: str = "none"

    def __post_init__(self):
        if self.restriction not in RESTRICTIONS:
            raise ValueError(f"restriction must be one of {RESTRICTIONS}")


def make_instance(spec: InstanceSpec) -> Tuple[MixedGraph, List[Experiment]]:
    rng = random.Random(f"satdisco:{spec.seed}:{spec.n}:{spec.restriction}")
    g = random_graph(spec.n, spec.edge_prob, rng)
    directed, bidirected = g.directed, g.bidirected
    if spec.restriction in ("acyclic", "both"):
        order = rng.sample(range(spec.n), spec.n)
        rank = {v: i for i, v in enumerate(order)}
        directed = frozenset((a, b) for a, b in directed if rank[a] < rank[b])
    if spec.restriction in ("no-latents", "both"):
        bidirected = frozenset()
    g = MixedGraph(g.names, directed, bidirected)
    return g, random_experiments(spec.n, spec.n_experiments, rng)


def instance_specs(n: int, count: int, seed: int, restriction: str = "none", **kw) -> List[InstanceSpec]:
    return [InstanceSpec(n, seed=seed * 100_003 + i, restriction=restriction, **kw) for i in range(count)]


@dataclass
class RunMetrics:
    seconds: float
    proportions: Dict[str, float]
    determinate_dir: float
    relations_encoded: int
    sat: Dict[str, object] = field(default_factory=dict)
    timed_out: bool = False


def truth_solution(g: MixedGraph) -> EdgeSolution:
    s = EdgeSolution(g.n)
    for x in range(g.n):
        anc = g.ancestors_of(x)
        for y in range(g.n):
            if x == y:
                continue
            s.directed[(x, y)] = Status.PRESENT if (x, y) in g.directed else Status.ABSENT
            s.ancestral[(y, x)] = Status.PRESENT if y in anc else Status.ABSENT
            if x < y:
                s.bidirected[(x, y)] = Status.PRESENT if g.has_bidirected(x, y) else Status.ABSENT
    return s


def check_sound(sol: EdgeSolution, g: MixedGraph) -> None:
    truth = truth_solution(g)
    for kind, pair, st in sol.items():
        if st == Status.UNKNOWN:
            continue
        table = {"dir": truth.directed, "bidir": truth.bidirected, "anc": truth.ancestral}[kind]
        if table[pair] != st:
            raise SoundnessError(f"{kind} {pair}: reported {st}, truth {table[pair]}")


def proportions(sol: EdgeSolution, g: MixedGraph) -> Dict[str, float]:
    """Share of true-present (resp. true-absent) items reported as such."""
    truth = truth_solution(g)
    out = {}
    for kind, mine, real in (
        ("dir", sol.directed, truth.directed),
        ("bidir", sol.bidirected, truth.bidirected),
        ("anc", sol.ancestral, truth.ancestral),
    ):
        for st in (Status.PRESENT, Status.ABSENT):
            items = [p for p, t in real.items() if t == st]
            hits = sum(1 for p in items if mine.get(p) == st)
            out[f"{kind}_{st.value}"] = hits / len(items) if items else math.nan
    return out


def measure(
    g: MixedGraph,
    experiments: Sequence[Experiment],
    cfg: DiscoveryConfig,
) -> RunMetrics:
    res = run_graph(g, experiments, cfg)
    check_sound(res.solution, g)
    dirs = list(res.solution.directed.values())
    return RunMetrics(
        seconds=res.seconds,
        proportions=proportions(res.solution, g),
        determinate_dir=sum(st != Status.UNKNOWN for st in dirs) / len(dirs),
        relations_encoded=len(res.encoded),
        sat=res.solver.stats(),
    )


def _child(queue, g, experiments, cfg):
    try:
        queue.put(("ok", measure(g, experiments, cfg)))
    except BaseException as exc:  # reported to the parent
        queue.put(("error", repr(exc)))


def measure_with_timeout(g, experiments, cfg, timeout: Optional[float]) -> RunMetrics:
    if not timeout:
        return measure(g, experiments, cfg)
    ctx = mp.get_context("fork")
    queue = ctx.Queue()
    proc = ctx.Process(target=_child, args=(queue, g, experiments, cfg))
    start = time.perf_counter()
    proc.start()
    try:
        status, payload = queue.get(timeout=timeout)
    except Exception:
        proc.kill()
        proc.join()
        return RunMetrics(time.perf_counter() - start, {}, math.nan, 0, timed_out=True)
    proc.join()
    if status != "ok":
        raise RuntimeError(f"instance failed: {payload}")
    return payload


# -- the three studies ----------------------------------------------------------


def run_scaling(
    n_range: Sequence[int],
    instances_per_n: int,
    max_c: Optional[int] = 2,
    seed: int = 0,
    timeout: Optional[float] = None,
    backend: Optional[str] = None,
) -> List[Dict[str, object]]:
    """Median runtime per n for the full procedure and the capped variant,
    on identical instance streams."""
    rows = []
    for n in n_range:
        specs = instance_specs(n, instances_per_n, seed)
        variants = [("full", None)]
        if max_c is not None and max_c < n - 2:
            variants.append((f"max_c={max_c}", max_c))
        for label, cap in variants:
            times, timeouts = [], 0
            for spec in specs:
                g, exps = make_instance(spec)
                m = measure_with_timeout(g, exps, DiscoveryConfig(max_c=cap, backend=backend), timeout)
                if m.timed_out:
                    timeouts += 1
                    times.append(math.inf)
                else:
                    times.append(m.seconds)
            rows.append(
                {
                    "n": n,
                    "variant": label,
                    "instances": len(specs),
                    "timeouts": timeouts,
                    "median_seconds": statistics.median(times),
                    "max_seconds": max(times),
                }
            )
    return rows


def run_identifiability(
    n: int,
    instances: int,
    seed: int = 0,
    max_cs: Optional[Sequence[int]] = None,
    backend: Optional[str] = None,
) -> Tuple[List[Dict[str, object]], List[List[Dict[str, float]]]]:
    """Mean identified proportions per category for each conditioning cap.

    Returns the table rows and, per instance, the list of proportion dicts in
    ``max_cs`` order.
    """
    max_cs = list(max_cs) if max_cs is not None else list(range(n - 1))
    per_instance = []
    for spec in instance_specs(n, instances, seed):
        g, exps = make_instance(spec)
        per_instance.append(
            [measure(g, exps, DiscoveryConfig(max_c=c, backend=backend)).proportions for c in max_cs]
        )
    rows = []
    for k, c in enumerate(max_cs):
        row: Dict[str, object] = {"max_c": c}
        for cat in CATEGORIES:
            vals = [inst[k][cat] for inst in per_instance if not math.isnan(inst[k][cat])]
            row[cat] = statistics.fmean(vals) if vals else math.nan
        rows.append(row)
    return rows, per_instance


def compatible(restriction: str, assumption: str) -> bool:
    acyclic, no_latents = ASSUMPTION_SETS[assumption]
    if acyclic and restriction not in ("acyclic", "both"):
        return False
    if no_latents and restriction not in ("no-latents", "both"):
        return False
    return True


def run_assumption_comparison(
    n: int,
    instances: int,
    seed: int = 0,
    restrictions: Sequence[str] = RESTRICTIONS,
    backend: Optional[str] = None,
) -> List[Dict[str, object]]:
    """Per ground-truth class and compatible assumption set: mean identified
    shares of directed edges / absences and of determinate directed items."""
    rows = []
    for restriction in restrictions:
        specs = instance_specs(n, instances, seed, restriction=restriction)
        instances_data = [make_instance(s) for s in specs]
        for name, (acyclic, no_latents) in ASSUMPTION_SETS.items():
            if not compatible(restriction, name):
                continue
            cfg = DiscoveryConfig(acyclic=acyclic, no_latents=no_latents, backend=backend)
            metrics = [measure(g, exps, cfg) for g, exps in instances_data]
            row: Dict[str, object] = {"truth": restriction, "assume": name, "instances": len(metrics)}
            for cat in ("dir_present", "dir_absent"):
                vals = [m.proportions[cat] for m in metrics if not math.isnan(m.proportions[cat])]
                row[cat] = statistics.fmean(vals) if vals else math.nan
            row["determinate_dir"] = statistics.fmean(m.determinate_dir for m in metrics)
            rows.append(row)
    return rows


def format_table(rows: Sequence[Dict[str, object]]) -> str:
    """Tab-separated table with a header row."""
    if not rows:
        return ""
    cols = list(rows[0])
    out = ["\t".join(cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r.get(c, "")
            cells.append(f"{v:.4f}" if isinstance(v, float) else str(v))
        out.append("\t".join(cells))
    return "\n".join(out) + "\n"

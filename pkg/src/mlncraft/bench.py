"""Decoupled-versus-recompute timing harness."""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass, field

from . import _backend
from .analysis import community_hub_counts, detect_communities, louvain
from .homln import compose_communities_and, compose_layers
from .kcommunity import LayerOrdering, k_community, parse_ordering


@dataclass
class BenchReport:
    ordering: str
    metric: str
    repetitions: int
    backend: str
    layer_seconds: dict
    step_seconds: list
    composition_total: float
    baseline_seconds: float
    ratio: float
    reduction: float
    homln_aggregate_seconds: float | None = None
    homln_decoupled_seconds: float | None = None
    match_counts: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchReport":
        names = cls.__dataclass_fields__
        return cls(**{k: v for k, v in doc.items() if k in names})


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return time.perf_counter() - start, out


def bench(net, ordering, metric="we", repetitions=5, seed=0, **options) -> BenchReport:
    """Median wall-clock costs of one k-community query.

    Per-layer Louvain runs are the one-time cost; each composition step
    (community bipartite graph, weights, matching) is timed separately.
    The recompute baseline re-runs Louvain on every layer for the query.
    On homogeneous networks the aggregate route ``Louvain(A AND B)`` is
    also timed against composing the two layers' communities.
    """
    if not isinstance(ordering, LayerOrdering):
        ordering = parse_ordering(net, ordering)
    reps = max(1, int(repetitions))
    names = list(dict.fromkeys(ordering.layers))

    layer_runs = {name: [] for name in names}
    sets = {}
    for _ in range(reps):
        for name in names:
            elapsed, sets[name] = _timed(detect_communities, net.layer(name), seed=seed)
            layer_runs[name].append(elapsed)
    for cset in sets.values():
        community_hub_counts(cset)

    step_runs = []
    result = None
    for _ in range(reps):
        timings = []
        result = k_community(net, ordering, metric, sets, seed=seed, timings=timings, **options)
        step_runs.append(timings)
    steps = [statistics.median(run[i] for run in step_runs) for i in range(len(step_runs[0]))]
    layer_seconds = {name: statistics.median(runs) for name, runs in layer_runs.items()}
    composition = sum(steps)
    one_time = sum(layer_seconds.values())
    baseline = one_time + composition
    largest = max(layer_seconds.values())

    aggregate = decoupled = None
    if net.is_homogeneous and len(names) >= 2:
        a, b = names[0], names[1]
        agg_runs, dec_runs = [], []
        for _ in range(reps):
            start = time.perf_counter()
            louvain(compose_layers(net, f"{a} AND {b}"), seed=seed)
            agg_runs.append(time.perf_counter() - start)
            elapsed, _ = _timed(compose_communities_and, sets[a], sets[b])
            dec_runs.append(elapsed)
        aggregate, decoupled = statistics.median(agg_runs), statistics.median(dec_runs)

    return BenchReport(
        ordering=str(ordering),
        metric=metric,
        repetitions=reps,
        backend=_backend.BACKEND,
        layer_seconds=layer_seconds,
        step_seconds=steps,
        composition_total=composition,
        baseline_seconds=baseline,
        ratio=composition / largest if largest > 0 else float("inf"),
        reduction=1.0 - composition / baseline if baseline > 0 else 0.0,
        homln_aggregate_seconds=aggregate,
        homln_decoupled_seconds=decoupled,
        match_counts=list(result.per_step_match_counts),
    )

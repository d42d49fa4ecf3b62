"""Run evaluation: per-node maximum idleness, the priority/graph maxima,
their ratio, and box-plot summaries across repeated runs.

Metrics are recomputed from the raw visit log (the single source of
truth); the simulator's incremental gap tracker is only a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import EmptyGroup, ValidationError
from .graph import ticks_to_seconds


@dataclass(frozen=True)
class RunMetrics:
    priority_max_idleness: float  # seconds
    graph_max_idleness: float  # seconds
    idleness_ratio: float | None  # None when priority max is 0
    per_node_max: dict  # node -> seconds
    visit_counts: dict  # node -> count

    def as_dict(self):
        d = asdict(self)
        d["per_node_max"] = {str(k): v for k, v in d["per_node_max"].items()}
        d["visit_counts"] = {str(k): v for k, v in d["visit_counts"].items()}
        return d


def max_gaps_from_log(visit_log, n_nodes, horizon):
    """Per-node maximum idleness (ticks) scanned from the visit log.

    Counts the gap from t=0 to the first visit and the open gap from the
    last visit to the horizon; a never-visited node scores the full horizon.
    """
    last = np.zeros(n_nodes, dtype=np.int64)
    best = np.zeros(n_nodes, dtype=np.int64)
    counts = np.zeros(n_nodes, dtype=np.int64)
    for rec in visit_log:
        gap = rec.time - last[rec.node]
        if gap > best[rec.node]:
            best[rec.node] = gap
        last[rec.node] = rec.time
        counts[rec.node] += 1
    np.maximum(best, horizon - last, out=best)
    return best, counts


def compute_metrics(run) -> RunMetrics:
    if not run.finished:
        raise ValidationError("run must be completed before computing metrics")
    g = run.graph
    best, counts = max_gaps_from_log(run.visit_log, g.n_nodes, run.horizon)
    pr = list(g.priority)
    pmax = int(best[pr].max())
    gmax = int(best.max())
    ratio = (gmax / pmax) if pmax > 0 else None
    return RunMetrics(
        priority_max_idleness=ticks_to_seconds(pmax),
        graph_max_idleness=ticks_to_seconds(gmax),
        idleness_ratio=ratio,
        per_node_max={v: ticks_to_seconds(int(best[v])) for v in range(g.n_nodes)},
        visit_counts={v: int(counts[v]) for v in range(g.n_nodes)},
    )


@dataclass(frozen=True)
class Summary:
    count: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    mean: float


def summarize(values) -> Summary:
    """Five-number summary plus mean, ready for a box plot."""
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        raise EmptyGroup("cannot summarize an empty group")
    q1, med, q3 = np.percentile(vals, [25, 50, 75])
    return Summary(
        count=int(vals.size),
        minimum=float(vals.min()),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        maximum=float(vals.max()),
        mean=float(vals.mean()),
    )


def aggregate(metrics_list, key_fn, value_fn=lambda m: m.graph_max_idleness):
    """Group runs by key_fn and summarize value_fn per group."""
    if not metrics_list:
        raise EmptyGroup("no runs to aggregate")
    groups = {}
    for m in metrics_list:
        groups.setdefault(key_fn(m), []).append(value_fn(m))
    return {k: summarize(v) for k, v in sorted(groups.items())}

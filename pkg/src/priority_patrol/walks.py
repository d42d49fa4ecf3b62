"""Offline rabbit-walk generation.

A rabbit walk goes from one priority node to another in three hops:
a depth-H exploratory walk, then two shortest paths routed through an
intermediate node that the first hop did not touch.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .errors import ResourceLimit, ValidationError
from .graph import PatrolGraph, ShortestPathTable, all_pairs_shortest_paths

BYTES_PER_NODE = 8  # accounting unit for resident-size estimates


@dataclass(frozen=True)
class RabbitWalk:
    nodes: tuple  # full node sequence, source first, target last
    hop_end_1: int  # index of the last node of hop 1 (== H)
    hop_end_2: int  # index of the intermediate node (end of hop 2)
    source: int
    target: int
    via: int
    duration: int  # summed edge travel ticks

    @property
    def hop1(self):
        return self.nodes[: self.hop_end_1 + 1]

    @property
    def hop2(self):
        return self.nodes[self.hop_end_1 : self.hop_end_2 + 1]

    @property
    def hop3(self):
        return self.nodes[self.hop_end_2 :]

    def distinct_nodes(self):
        return sorted(set(self.nodes))


def _segment_pairs(seq):
    """Unordered road segments traversed by a node sequence."""
    return {frozenset(p) for p in zip(seq, seq[1:])}


def generate_first_hops(g: PatrolGraph, source: int, depth: int):
    """All depth-`depth` walks from source that never reuse a road segment.

    A segment counts as used in either direction, so an immediate
    a->b->a bounce on a two-way road is excluded.
    """
    level = [(source,)]
    for _ in range(depth):
        nxt = []
        for w in level:
            used = _segment_pairs(w)
            last = w[-1]
            for v, _t in g.adj[last]:
                if frozenset((last, v)) not in used:
                    nxt.append(w + (v,))
        level = nxt
    return level


def walk_duration(g: PatrolGraph, seq) -> int:
    return sum(g.edge_ticks[(u, v)] for u, v in zip(seq, seq[1:]))


def generate_rabbit_walks(g: PatrolGraph, spt: ShortestPathTable, source: int, depth: int):
    """Build every rabbit walk from `source`, bucketed by target.

    Returns {(source, target): [RabbitWalk, ...]} with each bucket sorted by
    (duration, node sequence) and deduplicated on identical node sequences
    (the first construction-order witness is kept).
    """
    if source not in g.priority:
        raise ValidationError(f"source {source} is not a priority node")
    n = g.n_nodes
    paths = {}  # (u, v) -> node list, filled lazily

    def sp(u, v):
        key = (u, v)
        p = paths.get(key)
        if p is None:
            p = paths[key] = spt.path(u, v)
        return p

    buckets = {(source, t): {} for t in g.priority}
    for hop1 in generate_first_hops(g, source, depth):
        last = hop1[-1]
        hop1_dur = walk_duration(g, hop1)
        hop1_set = set(hop1)
        for v_r in range(n):
            if v_r in hop1_set:
                continue
            hop2 = sp(last, v_r)
            mid = hop1 + tuple(hop2[1:])
            mid_dur = hop1_dur + int(spt.dist[last, v_r])
            for tgt in g.priority:
                seq = mid + tuple(sp(v_r, tgt)[1:])
                bucket = buckets[(source, tgt)]
                if seq not in bucket:
                    bucket[seq] = RabbitWalk(
                        nodes=seq,
                        hop_end_1=depth,
                        hop_end_2=len(mid) - 1,
                        source=source,
                        target=tgt,
                        via=v_r,
                        duration=mid_dur + int(spt.dist[v_r, tgt]),
                    )
    return {
        key: sorted(bucket.values(), key=lambda w: (w.duration, w.nodes))
        for key, bucket in buckets.items()
    }


@dataclass
class WalkLibrary:
    """Phase-1 store of rabbit walks for one (graph, priority set, H) triple."""

    graph_hash: str
    depth: int
    walks: dict  # (source, target) -> sorted list of RabbitWalk
    stats: dict = field(default_factory=dict)
    _scoring: dict = field(default_factory=dict, repr=False)

    def bucket(self, source, target):
        return self.walks.get((source, target), [])

    def source_walks(self, source):
        out = []
        for (s, _t), lst in sorted(self.walks.items()):
            if s == source:
                out.extend(lst)
        return out

    def total_walks(self):
        return sum(len(v) for v in self.walks.values())

    def scoring_arrays(self, source, target, n_nodes):
        """Cached (membership CSR, durations) for vectorized reward scans.

        The CSR has one row per walk with 1s at the walk's distinct nodes,
        so rewards for a whole bucket are a single matvec with the
        idleness vector.
        """
        key = (source, target)
        cached = self._scoring.get(key)
        if cached is None:
            lst = self.bucket(source, target)
            indptr = [0]
            indices = []
            for w in lst:
                indices.extend(w.distinct_nodes())
                indptr.append(len(indices))
            m = csr_matrix(
                (
                    np.ones(len(indices), dtype=np.int64),
                    np.array(indices, dtype=np.int32),
                    np.array(indptr, dtype=np.int64),
                ),
                shape=(len(lst), n_nodes),
            )
            durations = np.array([w.duration for w in lst], dtype=np.int64)
            cached = self._scoring[key] = (m, durations)
        return cached


def estimate_bytes(walks_by_key) -> int:
    return sum(
        len(w.nodes) * BYTES_PER_NODE for lst in walks_by_key.values() for w in lst
    )


def build_walk_library(g: PatrolGraph, spt=None, depth=0, mem_cap=None) -> WalkLibrary:
    """Run walk generation for every priority source and collect stats.

    Raises ResourceLimit when the estimated resident size exceeds mem_cap.
    """
    if spt is None:
        spt = all_pairs_shortest_paths(g)
    if depth > g.n_nodes:
        warnings.warn(
            f"hop depth {depth} exceeds node count {g.n_nodes}; "
            "the library may be degenerate",
            stacklevel=2,
        )
    walks = {}
    for source in g.priority:
        walks.update(generate_rabbit_walks(g, spt, source, depth))
    est = estimate_bytes(walks)
    if mem_cap is not None and est > mem_cap:
        raise ResourceLimit(
            f"walk library for H={depth} needs ~{est} bytes (cap {mem_cap})",
            hops=depth,
            estimated_bytes=est,
        )
    per_source = {
        s: sum(len(lst) for (ss, _t), lst in walks.items() if ss == s)
        for s in g.priority
    }
    lib = WalkLibrary(graph_hash=g.content_hash(), depth=depth, walks=walks)
    lib.stats = {
        "per_source": per_source,
        "total": sum(per_source.values()),
        "estimated_bytes": est,
    }
    return lib


def validate_walk(g: PatrolGraph, w: RabbitWalk, spt: ShortestPathTable | None = None):
    """Check every structural invariant of a rabbit walk against g.

    Returns (ok, violations).
    """
    if spt is None:
        spt = all_pairs_shortest_paths(g)
    bad = []
    pr = set(g.priority)
    if not w.nodes:
        return False, ["empty walk"]
    if w.nodes[0] != w.source or w.source not in pr:
        bad.append("source mismatch or not a priority node")
    if w.nodes[-1] != w.target or w.target not in pr:
        bad.append("target mismatch or not a priority node")
    for u, v in zip(w.nodes, w.nodes[1:]):
        if (u, v) not in g.edge_ticks:
            bad.append(f"missing edge ({u},{v})")
    if not (0 <= w.hop_end_1 <= w.hop_end_2 < len(w.nodes)):
        bad.append("hop boundaries out of order")
        return False, bad
    hop1 = w.hop1
    segs = []
    for u, v in zip(hop1, hop1[1:]):
        seg = frozenset((u, v))
        if seg in segs:
            bad.append("pair rule: hop 1 reuses a road segment")
            break
        segs.append(seg)
    if w.via != w.nodes[w.hop_end_2]:
        bad.append("via node does not sit at the hop 2/3 boundary")
    if w.via in set(hop1):
        bad.append("via node appears in hop 1")
    if all("missing edge" not in b for b in bad):
        if walk_duration(g, w.hop2) != int(spt.dist[hop1[-1], w.via]):
            bad.append("hop 2 is not a shortest path")
        if walk_duration(g, w.hop3) != int(spt.dist[w.via, w.target]):
            bad.append("hop 3 is not a shortest path")
        if walk_duration(g, w.nodes) != w.duration:
            bad.append("cached duration mismatch")
    return (not bad), bad


def save_library(lib: WalkLibrary, path):
    """Persist a library as JSON keyed by (graph hash, H)."""
    doc = {
        "graph_hash": lib.graph_hash,
        "depth": lib.depth,
        "stats": lib.stats,
        "walks": {
            f"{s},{t}": [[list(w.nodes), w.hop_end_1, w.hop_end_2, w.via] for w in lst]
            for (s, t), lst in sorted(lib.walks.items())
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_library(g: PatrolGraph, path, expected_depth=None) -> WalkLibrary:
    with open(path) as fh:
        doc = json.load(fh)
    if doc["graph_hash"] != g.content_hash():
        raise ValidationError("library cache was built for a different graph")
    if expected_depth is not None and doc["depth"] != expected_depth:
        raise ValidationError(
            f"library cache has H={doc['depth']}, expected {expected_depth}"
        )
    walks = {}
    for key, lst in doc["walks"].items():
        s, t = (int(x) for x in key.split(","))
        walks[(s, t)] = [
            RabbitWalk(
                nodes=tuple(nodes),
                hop_end_1=h1,
                hop_end_2=h2,
                source=s,
                target=t,
                via=via,
                duration=walk_duration(g, nodes),
            )
            for nodes, h1, h2, via in lst
        ]
    lib = WalkLibrary(graph_hash=doc["graph_hash"], depth=doc["depth"], walks=walks)
    lib.stats = doc.get("stats", {})
    return lib

"""Patrol environment graphs: construction, validation, shortest paths.

Travel times are kept as integer microsecond ticks so that event ordering
in the simulator is exact and runs are bit-reproducible across hosts.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ParseError, ValidationError

TICKS_PER_SECOND = 1_000_000


def seconds_to_ticks(seconds: float) -> int:
    return int(math.floor(seconds * TICKS_PER_SECOND + 0.5))


def ticks_to_seconds(ticks: int) -> float:
    return ticks / TICKS_PER_SECOND


def format_ticks(ticks: int) -> str:
    """Fixed 6-decimal seconds string, computed in integer arithmetic."""
    sign = "-" if ticks < 0 else ""
    ticks = abs(ticks)
    return f"{sign}{ticks // TICKS_PER_SECOND}.{ticks % TICKS_PER_SECOND:06d}"


@dataclass(frozen=True)
class PatrolGraph:
    """Strongly connected directed graph with timed edges and priority nodes.

    Immutable after construction; safe for concurrent readers.
    """

    n_nodes: int
    edges: tuple  # ((u, v, length_m, travel_ticks), ...) sorted by (u, v)
    priority: tuple  # sorted node ids, non-empty strict subset
    speed: float  # m/s, used to derive travel_ticks from length
    coords: tuple | None = None  # optional ((x, y), ...) per node
    adj: tuple = field(init=False, repr=False)  # out-neighbors per node
    edge_ticks: dict = field(init=False, repr=False)

    def __post_init__(self):
        _validate(self)
        adj = [[] for _ in range(self.n_nodes)]
        ticks = {}
        for u, v, _length, t in self.edges:
            adj[u].append((v, t))
            ticks[(u, v)] = t
        for lst in adj:
            lst.sort()
        object.__setattr__(self, "adj", tuple(tuple(lst) for lst in adj))
        object.__setattr__(self, "edge_ticks", ticks)

    @property
    def nodes(self):
        return range(self.n_nodes)

    @property
    def non_priority(self):
        pr = set(self.priority)
        return tuple(v for v in range((self.n_nodes)) if v not in pr)

    def out_neighbors(self, u: int):
        return self.adj[u]

    def max_out_degree(self) -> int:
        return max(len(self.adj[u]) for u in range(self.n_nodes))

    def content_hash(self) -> str:
        """Stable hash of the graph structure, used to key library caches."""
        payload = json.dumps(
            {
                "n": self.n_nodes,
                "edges": [[u, v, length] for u, v, length, _ in self.edges],
                "priority": list(self.priority),
                "speed": self.speed,
            },
            sort_keys=True,
        ).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def _validate(g: PatrolGraph):
    n = g.n_nodes
    if n < 2:
        raise ValidationError("graph needs at least 2 nodes")
    seen = set()
    for u, v, length, t in g.edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u},{v}) references unknown node")
        if u == v:
            raise ValidationError(f"self-loop at node {u} not allowed")
        if length <= 0:
            raise ValidationError(f"edge ({u},{v}) has nonpositive length")
        if (u, v) in seen:
            raise ValidationError(f"duplicate edge ({u},{v})")
        seen.add((u, v))
        if t <= 0:
            raise ValidationError(f"edge ({u},{v}) has nonpositive travel time")
    if g.speed <= 0:
        raise ValidationError("speed must be positive")
    if not g.priority:
        raise ValidationError("priority set must be non-empty")
    pr = set(g.priority)
    if len(pr) != len(g.priority):
        raise ValidationError("duplicate priority node ids")
    if not pr.issubset(range(n)):
        raise ValidationError("priority node out of range")
    if len(pr) == n:
        raise ValidationError("priority set must be a strict subset of nodes")
    if not _strongly_connected(n, g.edges):
        raise ValidationError("graph is not strongly connected")


def _strongly_connected(n, edges) -> bool:
    if not edges:
        return False
    rows = np.fromiter((e[0] for e in edges), dtype=np.int64)
    cols = np.fromiter((e[1] for e in edges), dtype=np.int64)
    data = np.ones(len(rows), dtype=np.int8)
    m = csr_matrix((data, (rows, cols)), shape=(n, n))
    n_comp, _ = connected_components(m, directed=True, connection="strong")
    return n_comp == 1


def build_graph(n_nodes, edge_list, priority, speed=10.0, coords=None):
    """Assemble a PatrolGraph from (u, v, length_m) triples.

    Travel time is always derived from length and speed, never stored
    in the input, so speed stays a single scenario knob.
    """
    edges = tuple(
        sorted(
            (int(u), int(v), float(length), seconds_to_ticks(float(length) / speed))
            for u, v, length in edge_list
        )
    )
    return PatrolGraph(
        n_nodes=int(n_nodes),
        edges=edges,
        priority=tuple(sorted(int(p) for p in priority)),
        speed=float(speed),
        coords=tuple(coords) if coords is not None else None,
    )


def make_grid(rows, cols, edge_length, priority, speed=10.0):
    """4-connected grid; every undirected adjacency becomes two directed edges."""
    if rows < 2 or cols < 2:
        raise ValidationError("grid needs rows, cols >= 2")
    if edge_length <= 0:
        raise ValidationError("edge_length must be positive")
    n = rows * cols
    edge_list = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edge_list += [(u, u + 1, edge_length), (u + 1, u, edge_length)]
            if r + 1 < rows:
                edge_list += [(u, u + cols, edge_length), (u + cols, u, edge_length)]
    coords = [(c * edge_length, r * edge_length) for r in range(rows) for c in range(cols)]
    return build_graph(n, edge_list, priority, speed=speed, coords=coords)


def load_graph(source, speed=10.0):
    """Load a graph document (path, file object, or parsed dict).

    Two accepted forms: explicit nodes/edges/priority, or a
    grid {rows, cols, edge_length} plus priority.
    """
    if isinstance(source, dict):
        doc = source
    else:
        try:
            if hasattr(source, "read"):
                doc = json.load(source)
            else:
                with open(source) as fh:
                    doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read graph document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("graph document must be a JSON object")

    priority = doc.get("priority")
    if priority is None:
        raise ParseError("graph document missing 'priority'")

    if "grid" in doc:
        grid = doc["grid"]
        try:
            return make_grid(
                int(grid["rows"]),
                int(grid["cols"]),
                float(grid["edge_length"]),
                priority,
                speed=speed,
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed grid spec: {exc}") from exc

    try:
        nodes = doc["nodes"]
        edges = doc["edges"]
    except KeyError as exc:
        raise ParseError(f"graph document missing {exc}") from exc
    ids = [int(nd["id"]) for nd in nodes]
    if sorted(ids) != list(range(len(ids))):
        raise ParseError("node ids must be the dense integers 0..|V|-1")
    coords = None
    if all("x" in nd and "y" in nd for nd in nodes):
        by_id = {int(nd["id"]): (float(nd["x"]), float(nd["y"])) for nd in nodes}
        coords = [by_id[i] for i in range(len(ids))]
    try:
        edge_list = [(int(e["from"]), int(e["to"]), float(e["length"])) for e in edges]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed edge entry: {exc}") from exc
    return build_graph(len(ids), edge_list, priority, speed=speed, coords=coords)


# small enough that INF + INF stays inside int64 during relaxation
_INF = np.int64(2**60)


@dataclass(frozen=True)
class ShortestPathTable:
    """All-pairs shortest travel times (ticks) with next-hop reconstruction.

    Among equal-cost paths the one whose next node has the smaller id wins,
    applied recursively, so path choice is fully deterministic.
    """

    dist: np.ndarray  # int64 ticks, |V| x |V|
    next_hop: np.ndarray  # int32 node ids; next_hop[u][u] = u

    def path(self, u: int, v: int):
        """Node sequence from u to v inclusive."""
        seq = [u]
        while seq[-1] != v:
            seq.append(int(self.next_hop[seq[-1], v]))
        return seq


def all_pairs_shortest_paths(g: PatrolGraph) -> ShortestPathTable:
    n = g.n_nodes
    dist = np.full((n, n), _INF, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for u, v, _length, t in g.edges:
        dist[u, v] = min(dist[u, v], t)
    for k in range(n):
        np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :], out=dist)

    next_hop = np.full((n, n), -1, dtype=np.int32)
    np.fill_diagonal(next_hop, np.arange(n, dtype=np.int32))
    for u in range(n):
        # neighbors already sorted by id; first consistent one wins
        for w, t in g.adj[u]:
            mask = (next_hop[u] < 0) & (t + dist[w] == dist[u])
            next_hop[u, mask] = w
    assert (next_hop >= 0).all()
    return ShortestPathTable(dist=dist, next_hop=next_hop)


def spread_priority_nodes(g_or_grid, k, spt=None):
    """Pick k well-separated nodes deterministically (farthest-point greedy).

    Starts from node 0 and repeatedly adds the node maximizing its minimum
    shortest-path time to the chosen set, ties broken by smaller id.
    """
    if spt is None:
        spt = all_pairs_shortest_paths(g_or_grid)
    n = spt.dist.shape[0]
    if not (1 <= k < n):
        raise ValidationError(f"priority count {k} out of range for {n} nodes")
    chosen = [0]
    # symmetric separation: max over min of round-trip-ish measure; use
    # min(dist[to], dist[from]) so direction does not bias the spread
    sep = np.minimum(spt.dist, spt.dist.T)
    while len(chosen) < k:
        mind = sep[:, chosen].min(axis=1)
        mind[chosen] = -1
        best = int(np.argmax(mind))  # argmax returns the smallest index on ties
        chosen.append(best)
    return tuple(sorted(chosen))

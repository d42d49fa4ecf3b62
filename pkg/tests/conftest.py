"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately re-derive results from first principles
(edge relaxation, recursive enumeration, linear scans) so the library
code is never checked against itself.
"""

import random

import pytest

from priority_patrol import (
    all_pairs_shortest_paths,
    build_graph,
    build_walk_library,
    make_grid,
)

GRID5_PRIORITY = (0, 4, 20, 24)


@pytest.fixture(scope="session")
def grid5():
    return make_grid(5, 5, 50.0, GRID5_PRIORITY)


@pytest.fixture(scope="session")
def grid5_spt(grid5):
    return all_pairs_shortest_paths(grid5)


@pytest.fixture(scope="session")
def grid5_libs(grid5, grid5_spt):
    return {h: build_walk_library(grid5, grid5_spt, h) for h in (0, 3, 5)}


def cycle3():
    """Directed 3-cycle, 10 m edges, priority {0}."""
    return build_graph(3, [(0, 1, 10.0), (1, 2, 10.0), (2, 0, 10.0)], (0,))


@pytest.fixture
def cycle3_graph():
    return cycle3()


def random_scc_graph(rng, n_min=3, n_max=8, extra_p=0.25):
    """Random strongly connected digraph: shuffled cycle + random extras."""
    n = rng.randint(n_min, n_max)
    perm = list(range(n))
    rng.shuffle(perm)
    edges = {(perm[i], perm[(i + 1) % n]) for i in range(n)}
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < extra_p:
                edges.add((u, v))
    edge_list = [(u, v, float(rng.randint(10, 100))) for (u, v) in sorted(edges)]
    priority = tuple(sorted(rng.sample(range(n), rng.randint(1, n - 1))))
    return build_graph(n, edge_list, priority)


def bellman_ford_all_pairs(g):
    """Edge-relaxation oracle for shortest travel times (ticks)."""
    inf = float("inf")
    n = g.n_nodes
    dist = {(u, v): (0 if u == v else inf) for u in range(n) for v in range(n)}
    for _ in range(n - 1):
        changed = False
        for u, v, _length, t in g.edges:
            for s in range(n):
                cand = dist[(s, u)] + t
                if cand < dist[(s, v)]:
                    dist[(s, v)] = cand
                    changed = True
        if not changed:
            break
    return dist


def reachable_from(g, start):
    """Plain DFS reachability."""
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v, _t in g.adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def brute_force_first_hops(g, source, depth):
    """Recursive enumeration of depth-H pair-rule walks."""
    out = []

    def rec(w):
        if len(w) - 1 == depth:
            out.append(tuple(w))
            return
        used = {frozenset(p) for p in zip(w, w[1:])}
        for v, _t in g.adj[w[-1]]:
            if frozenset((w[-1], v)) not in used:
                rec(w + [v])

    rec([source])
    return out


def brute_force_library_sequences(g, spt, source, depth):
    """All rabbit-walk node sequences per (source, target), as sets."""
    buckets = {(source, t): set() for t in g.priority}
    for hop1 in brute_force_first_hops(g, source, depth):
        for v_r in range(g.n_nodes):
            if v_r in hop1:
                continue
            mid = hop1 + tuple(spt.path(hop1[-1], v_r)[1:])
            for tgt in g.priority:
                buckets[(source, tgt)].add(mid + tuple(spt.path(v_r, tgt)[1:]))
    return buckets


def linear_scan_argmax(candidates, idl, t):
    """Reference argmax with the documented tie-break."""
    best = None
    best_key = None
    for w in candidates:
        r = sum(t - int(idl.last_visit[v]) for v in set(w.nodes))
        key = (-r, w.duration, w.nodes)
        if best is None or key < best_key:
            best, best_key = (w, r), key
    return best


def seeded_rng(seed):
    return random.Random(seed)

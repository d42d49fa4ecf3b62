"""Online walk assignment: candidate targets per policy variant, idleness
rewards, and the argmax walk choice."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCandidates, ValidationError
from .graph import PatrolGraph
from .walks import RabbitWalk, WalkLibrary

VARIANTS = ("exhaustive", "sampled", "random", "greedy")


class IdlenessTable:
    """Per-node last-visit timestamps in ticks.

    All nodes count as visited at t=0, so idleness starts at zero
    everywhere. The table also tracks the largest inter-visit gap seen so
    far per node (an incremental mirror of what the visit log implies).
    """

    def __init__(self, n_nodes: int):
        self.n_nodes = n_nodes
        self.last_visit = np.zeros(n_nodes, dtype=np.int64)
        self.max_gap = np.zeros(n_nodes, dtype=np.int64)

    def idleness(self, t: int) -> np.ndarray:
        return t - self.last_visit

    def node_idleness(self, node: int, t: int) -> int:
        return int(t - self.last_visit[node])

    def visit(self, node: int, t: int):
        gap = t - self.last_visit[node]
        if gap < 0:
            raise ValidationError("visit timestamp precedes last visit")
        if gap > self.max_gap[node]:
            self.max_gap[node] = gap
        self.last_visit[node] = t

    def closed_max_gaps(self, horizon: int) -> np.ndarray:
        """Per-node maxima with the final open gap up to `horizon` folded in."""
        return np.maximum(self.max_gap, horizon - self.last_visit)


@dataclass
class PolicyState:
    """Variant selection plus whatever mutable state the variant needs.

    Greedy counters are shared by all agents; the rng drives the sampled
    and random variants only.
    """

    variant: str
    priority: tuple
    sample_n: int | None = None
    seed: int | None = None
    counters: dict = field(default_factory=dict)
    rng: random.Random = field(default=None, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown variant {self.variant!r}")
        if self.variant == "sampled":
            if self.sample_n is None:
                raise ValidationError("sampled variant needs sample_n")
            if not (1 <= self.sample_n <= len(self.priority)):
                raise ValidationError(
                    f"sample_n must be in 1..{len(self.priority)}"
                )
        if not self.counters:
            self.counters = {t: 0 for t in self.priority}
        if self.rng is None:
            self.rng = random.Random(self.seed)

    def clone(self):
        """Deep copy including the rng stream position (for oracles/tests)."""
        c = PolicyState(
            variant=self.variant,
            priority=self.priority,
            sample_n=self.sample_n,
            seed=self.seed,
            counters=dict(self.counters),
        )
        c.rng.setstate(self.rng.getstate())
        return c


def choose_targets(policy: PolicyState):
    """Pick the target priority nodes for one assignment, per variant.

    Greedy increments the winning counter exactly once per call.
    """
    pr = policy.priority
    if policy.variant == "exhaustive":
        return list(pr)
    if policy.variant == "sampled":
        return sorted(policy.rng.sample(pr, policy.sample_n))
    if policy.variant == "random":
        return [policy.rng.choice(pr)]
    # greedy: least-assigned target, ties to the smaller node id
    tgt = min(pr, key=lambda v: (policy.counters[v], v))
    policy.counters[tgt] += 1
    return [tgt]


def candidate_set(lib: WalkLibrary, source: int, policy: PolicyState):
    """Candidate walks for one assignment decision.

    Returns (walks, searched) where searched counts every walk considered.
    """
    targets = choose_targets(policy)
    walks = []
    for tgt in targets:
        walks.extend(lib.bucket(source, tgt))
    if not walks:
        raise EmptyCandidates(
            f"no walks from source {source} to targets {targets}"
        )
    return walks, len(walks), targets


def reward(w: RabbitWalk, idl: IdlenessTable, t: int) -> int:
    """Sum of instantaneous idleness over the walk's distinct nodes."""
    last = idl.last_visit
    return int(sum(t - int(last[v]) for v in set(w.nodes)))


@dataclass(frozen=True)
class Assignment:
    walk: RabbitWalk
    reward: int
    decided_at: int
    agent: int
    candidates_searched: int
    targets: tuple


def assign_walk(
    lib: WalkLibrary,
    source: int,
    idl: IdlenessTable,
    t: int,
    policy: PolicyState,
    agent: int = 0,
) -> Assignment:
    """Pick the maximum-reward candidate walk.

    Ties break to the shorter duration, then the lexicographically
    smaller node sequence.
    """
    targets = choose_targets(policy)
    idleness = idl.idleness(t)
    best = None  # (neg handled manually) current winner
    best_key = None
    searched = 0
    for tgt in targets:
        bucket = lib.bucket(source, tgt)
        if not bucket:
            continue
        searched += len(bucket)
        m, _dur = lib.scoring_arrays(source, tgt, idl.n_nodes)
        rewards = m @ idleness
        top = int(rewards.max())
        if best is not None and top < best[0]:
            continue
        for i in np.flatnonzero(rewards == top):
            w = bucket[int(i)]
            key = (w.duration, w.nodes)
            if best is None or top > best[0] or key < best_key:
                best = (top, w)
                best_key = key
    if best is None:
        raise EmptyCandidates(f"no walks from source {source} to targets {targets}")
    return Assignment(
        walk=best[1],
        reward=best[0],
        decided_at=t,
        agent=agent,
        candidates_searched=searched,
        targets=tuple(targets),
    )

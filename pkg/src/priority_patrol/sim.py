"""Deterministic event-driven patrolling simulator.

One run is a single serialized event loop over integer-tick timestamps;
parallelism only ever happens across independent runs.
"""

from __future__ import annotations

import csv
import heapq
import random
import time as _time
from dataclasses import dataclass, field

from .assignment import IdlenessTable, PolicyState, assign_walk
from .errors import SimulationStalled, ValidationError
from .graph import (
    PatrolGraph,
    all_pairs_shortest_paths,
    format_ticks,
    seconds_to_ticks,
)
from .walks import WalkLibrary, build_walk_library


@dataclass
class ScenarioConfig:
    graph: PatrolGraph
    n_agents: int
    hops: int
    variant: str
    horizon_s: float
    seed: int = 0
    sample_n: int | None = None
    start_nodes: tuple | None = None
    mem_cap: int | None = None

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValidationError("need at least one agent")
        if self.start_nodes is not None:
            if len(self.start_nodes) != self.n_agents:
                raise ValidationError("start_nodes length must equal n_agents")
            for s in self.start_nodes:
                if not (0 <= s < self.graph.n_nodes):
                    raise ValidationError(f"start node {s} out of range")
        if self.horizon_s < 0:
            raise ValidationError("horizon must be nonnegative")


@dataclass
class AgentState:
    agent_id: int
    nodes: tuple  # current walk (or initial-approach path)
    next_idx: int  # index of the node the agent is heading to
    walk_id: int
    position: int | None = None  # last node reached


@dataclass
class VisitRecord:
    time: int
    agent: int
    node: int
    walk_id: int


@dataclass
class AssignmentRecord:
    time: int
    agent: int
    node: int
    walk_id: int
    variant: str
    target: int
    reward: int
    candidates_searched: int
    decision_us: int  # wall clock; performance field, not simulated state


@dataclass
class SimulationRun:
    graph: PatrolGraph
    spt: object
    library: WalkLibrary
    policy: PolicyState
    idleness: IdlenessTable
    agents: list
    horizon: int  # ticks
    clock: int = 0
    events: list = field(default_factory=list)  # heap of (time, agent_id)
    visit_log: list = field(default_factory=list)
    assignments: list = field(default_factory=list)
    _next_walk_id: int = 0
    finished: bool = False


def initialize(config: ScenarioConfig, library: WalkLibrary | None = None,
               spt=None) -> SimulationRun:
    """Build (or accept a cached) walk library and place the agents.

    An agent starting off the priority set first walks the shortest path to
    its nearest priority node (ties to the smaller node id); agents already
    on priority nodes request an assignment at t=0, in agent-id order.
    """
    g = config.graph
    if spt is None:
        spt = all_pairs_shortest_paths(g)
    if library is None:
        library = build_walk_library(g, spt, config.hops, mem_cap=config.mem_cap)
    rng = random.Random(config.seed)
    starts = config.start_nodes
    if starts is None:
        starts = tuple(rng.sample(range(g.n_nodes), config.n_agents))
    policy = PolicyState(
        variant=config.variant,
        priority=g.priority,
        sample_n=config.sample_n,
        rng=rng,
    )
    run = SimulationRun(
        graph=g,
        spt=spt,
        library=library,
        policy=policy,
        idleness=IdlenessTable(g.n_nodes),
        agents=[],
        horizon=seconds_to_ticks(config.horizon_s),
    )
    pr = set(g.priority)
    for aid, start in enumerate(starts):
        if start in pr:
            walk = (start,)
        else:
            goal = min(pr, key=lambda p: (int(spt.dist[start, p]), p))
            walk = tuple(spt.path(start, goal))
        run.agents.append(
            AgentState(agent_id=aid, nodes=walk, next_idx=0,
                       walk_id=run._next_walk_id)
        )
        run._next_walk_id += 1
        heapq.heappush(run.events, (0, aid))
    return run


def step(run: SimulationRun):
    """Process the earliest event; returns the records it produced."""
    if not run.events:
        raise SimulationStalled("event queue empty")
    t, aid = heapq.heappop(run.events)
    assert t >= run.clock
    run.clock = t
    agent = run.agents[aid]
    node = agent.nodes[agent.next_idx]
    agent.position = node
    records = [VisitRecord(time=t, agent=aid, node=node, walk_id=agent.walk_id)]
    run.visit_log.append(records[0])
    run.idleness.visit(node, t)

    if agent.next_idx == len(agent.nodes) - 1:
        # walk complete: the agent is at a priority node, get a new walk
        wall0 = _time.perf_counter()
        asg = assign_walk(
            run.library, node, run.idleness, t, run.policy, agent=aid
        )
        decision_us = int((_time.perf_counter() - wall0) * 1e6)
        agent.nodes = asg.walk.nodes
        agent.next_idx = 1
        agent.walk_id = run._next_walk_id
        run._next_walk_id += 1
        rec = AssignmentRecord(
            time=t,
            agent=aid,
            node=node,
            walk_id=agent.walk_id,
            variant=run.policy.variant,
            target=asg.walk.target,
            reward=asg.reward,
            candidates_searched=asg.candidates_searched,
            decision_us=decision_us,
        )
        run.assignments.append(rec)
        records.append(rec)
    else:
        agent.next_idx += 1
    u, v = agent.position, agent.nodes[agent.next_idx]
    edge = run.graph.edge_ticks.get((u, v))
    if edge is None:
        raise SimulationStalled(f"no edge ({u},{v}) mid-walk")
    heapq.heappush(run.events, (t + edge, aid))
    return records


def run_to_horizon(run: SimulationRun) -> SimulationRun:
    """Process events up to and including the horizon tick.

    Events scheduled beyond the horizon are discarded; a partial edge
    traversal at the horizon logs no visit.
    """
    while run.events and run.events[0][0] <= run.horizon:
        step(run)
    run.clock = run.horizon
    run.finished = True
    return run


def run_scenario(config: ScenarioConfig, library=None, spt=None) -> SimulationRun:
    return run_to_horizon(initialize(config, library=library, spt=spt))


VISIT_LOG_COLUMNS = (
    "time_s",
    "agent_id",
    "node_id",
    "walk_id",
    "event_kind",
    "variant",
    "target",
    "reward_s",
    "candidates_searched",
    "decision_us",
)


def log_rows(run: SimulationRun, include_decision_us=True):
    """Merged arrival/assignment rows in event order.

    decision_us is wall-clock and therefore not deterministic; callers
    comparing logs across runs should drop it (include_decision_us=False).
    """
    rows = []
    asg_iter = iter(run.assignments)
    pending = next(asg_iter, None)
    for rec in run.visit_log:
        rows.append(
            [
                format_ticks(rec.time),
                str(rec.agent),
                str(rec.node),
                str(rec.walk_id),
                "arrival",
                "",
                "",
                "",
                "",
                "",
            ]
        )
        while (
            pending is not None
            and pending.time == rec.time
            and pending.agent == rec.agent
            and pending.node == rec.node
        ):
            rows.append(
                [
                    format_ticks(pending.time),
                    str(pending.agent),
                    str(pending.node),
                    str(pending.walk_id),
                    "assignment",
                    pending.variant,
                    str(pending.target),
                    format_ticks(pending.reward),
                    str(pending.candidates_searched),
                    str(pending.decision_us) if include_decision_us else "",
                ]
            )
            pending = next(asg_iter, None)
    return rows


def write_visit_log(run: SimulationRun, path, include_decision_us=True):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(VISIT_LOG_COLUMNS)
        writer.writerows(log_rows(run, include_decision_us=include_decision_us))

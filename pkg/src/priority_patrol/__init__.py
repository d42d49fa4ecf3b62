"""Priority patrolling on directed graphs.

Offline rabbit-walk route generation plus four online assignment variants
(exhaustive, sampled, random, greedy), a deterministic event-driven
multi-agent simulator, and idleness-based evaluation metrics.
"""

from .assignment import (
    Assignment,
    IdlenessTable,
    PolicyState,
    assign_walk,
    candidate_set,
    reward,
)
from .errors import (
    EmptyCandidates,
    EmptyGroup,
    ParseError,
    PatrolError,
    ResourceLimit,
    SimulationStalled,
    ValidationError,
)
from .graph import (
    PatrolGraph,
    ShortestPathTable,
    all_pairs_shortest_paths,
    build_graph,
    load_graph,
    make_grid,
    spread_priority_nodes,
)
from .metrics import RunMetrics, aggregate, compute_metrics, summarize
from .sim import (
    ScenarioConfig,
    SimulationRun,
    initialize,
    run_scenario,
    run_to_horizon,
    step,
    write_visit_log,
)
from .walks import (
    RabbitWalk,
    WalkLibrary,
    build_walk_library,
    generate_first_hops,
    generate_rabbit_walks,
    load_library,
    save_library,
    validate_walk,
)

__all__ = [
    "Assignment",
    "EmptyCandidates",
    "EmptyGroup",
    "IdlenessTable",
    "ParseError",
    "PatrolError",
    "PatrolGraph",
    "PolicyState",
    "RabbitWalk",
    "ResourceLimit",
    "RunMetrics",
    "ScenarioConfig",
    "ShortestPathTable",
    "SimulationRun",
    "SimulationStalled",
    "ValidationError",
    "WalkLibrary",
    "aggregate",
    "all_pairs_shortest_paths",
    "assign_walk",
    "build_graph",
    "build_walk_library",
    "candidate_set",
    "compute_metrics",
    "generate_first_hops",
    "generate_rabbit_walks",
    "initialize",
    "load_graph",
    "load_library",
    "make_grid",
    "reward",
    "run_scenario",
    "run_to_horizon",
    "save_library",
    "spread_priority_nodes",
    "step",
    "summarize",
    "validate_walk",
    "write_visit_log",
]

__version__ = "0.1.0"

"""Command-line front end: single runs, parameter sweeps, and walk-library
resource reports.

Every flag can also be supplied through an environment variable with the
PPA_ prefix (e.g. PPA_GRAPH, PPA_HORIZON).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time as _time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import metrics as metrics_mod
from .assignment import VARIANTS, IdlenessTable, PolicyState, assign_walk
from .errors import PatrolError, ValidationError
from .graph import (
    all_pairs_shortest_paths,
    load_graph,
    make_grid,
    spread_priority_nodes,
)
from .sim import ScenarioConfig, run_scenario, write_visit_log
from .walks import build_walk_library, load_library, save_library

GRID5_EDGE_M = 50.0
ENV_PREFIX = "PPA_"


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _parse_ids(text):
    return tuple(int(x) for x in str(text).split(",") if x != "")


def resolve_graph(spec, priority, speed):
    """Accept 'grid5' or a graph-document path; 'auto:k' picks spread nodes."""
    if spec == "grid5":
        if isinstance(priority, str) and priority.startswith("auto:"):
            k = int(priority.split(":")[1])
            g0 = make_grid(5, 5, GRID5_EDGE_M, (0,), speed=speed)
            priority = spread_priority_nodes(g0, k)
        elif priority is None:
            priority = (0, 4, 20, 24)
        else:
            priority = _parse_ids(priority) if isinstance(priority, str) else priority
        return make_grid(5, 5, GRID5_EDGE_M, priority, speed=speed)
    if not Path(spec).exists():
        raise ValidationError(f"graph file not found: {spec}")
    g = load_graph(spec, speed=speed)
    if priority is not None:
        if isinstance(priority, str) and priority.startswith("auto:"):
            k = int(priority.split(":")[1])
            pr = spread_priority_nodes(g, k)
        else:
            pr = _parse_ids(priority) if isinstance(priority, str) else tuple(priority)
        from .graph import build_graph

        g = build_graph(
            g.n_nodes,
            [(u, v, length) for u, v, length, _ in g.edges],
            pr,
            speed=speed,
            coords=g.coords,
        )
    return g


def get_library(graph, hops, cache_dir=None, mem_cap=None, spt=None):
    """Build the walk library, going through the on-disk cache if enabled."""
    if cache_dir:
        cache_dir = Path(cache_dir)
        cache_dir.mkdir(parents=True, exist_ok=True)
        path = cache_dir / f"{graph.content_hash()}_H{hops}.json"
        if path.exists():
            return load_library(graph, path, expected_depth=hops)
        lib = build_walk_library(graph, spt, hops, mem_cap=mem_cap)
        save_library(lib, path)
        return lib
    return build_walk_library(graph, spt, hops, mem_cap=mem_cap)


def _add_common(p):
    p.add_argument("--graph", default=_env("graph", "grid5"),
                   help="graph document path, or 'grid5' for the built-in grid")
    p.add_argument("--priority", default=_env("priority"),
                   help="comma-separated node ids, or 'auto:k'")
    p.add_argument("--speed", type=float, default=float(_env("speed", 10.0)),
                   help="agent speed in m/s")
    p.add_argument("--lib-cache", default=_env("lib_cache"),
                   help="directory for walk-library cache files")
    p.add_argument("--mem-cap", type=int,
                   default=int(_env("mem_cap", 0)) or None,
                   help="abort library builds above this estimated byte size")


def cmd_run(args):
    g = resolve_graph(args.graph, args.priority, args.speed)
    config = ScenarioConfig(
        graph=g,
        n_agents=args.agents,
        hops=args.hops,
        variant=args.variant,
        horizon_s=args.horizon,
        seed=args.seed,
        sample_n=args.sample_n,
        start_nodes=_parse_ids(args.start_nodes) if args.start_nodes else None,
        mem_cap=args.mem_cap,
    )
    spt = all_pairs_shortest_paths(g)
    lib = get_library(g, args.hops, cache_dir=args.lib_cache,
                      mem_cap=args.mem_cap, spt=spt)
    run = run_scenario(config, library=lib, spt=spt)
    m = metrics_mod.compute_metrics(run)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_visit_log(run, out / "visits.csv")
    report = {
        "config": {
            "graph": args.graph,
            "priority": list(g.priority),
            "agents": args.agents,
            "hops": args.hops,
            "variant": args.variant,
            "sample_n": args.sample_n,
            "speed": args.speed,
            "horizon_s": args.horizon,
            "seed": args.seed,
        },
        "metrics": m.as_dict(),
    }
    with open(out / "metrics.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    with open(out / "library_stats.json", "w") as fh:
        json.dump(lib.stats, fh, indent=2, sort_keys=True)
    print(f"priority_max_idleness_s {m.priority_max_idleness}")
    print(f"graph_max_idleness_s {m.graph_max_idleness}")
    print(f"idleness_ratio {m.idleness_ratio}")
    return 0


SWEEP_COLUMNS = (
    "graph",
    "priority_size",
    "priority",
    "agents",
    "hops",
    "variant",
    "sample_n",
    "repeat",
    "seed",
    "priority_max_idleness_s",
    "graph_max_idleness_s",
    "idleness_ratio",
)


def _sweep_cell(cell):
    """One sweep run; module-level so a process pool can pickle it."""
    g = resolve_graph(cell["graph"], cell["priority"], cell["speed"])
    spt = all_pairs_shortest_paths(g)
    lib = get_library(g, cell["hops"], cache_dir=cell["lib_cache"], spt=spt)
    config = ScenarioConfig(
        graph=g,
        n_agents=cell["agents"],
        hops=cell["hops"],
        variant=cell["variant"],
        horizon_s=cell["horizon"],
        seed=cell["seed"],
        sample_n=cell["sample_n"],
    )
    run = run_scenario(config, library=lib, spt=spt)
    m = metrics_mod.compute_metrics(run)
    return [
        cell["graph"],
        str(len(g.priority)),
        ";".join(str(p) for p in g.priority),
        str(cell["agents"]),
        str(cell["hops"]),
        cell["variant"],
        str(cell["sample_n"] or ""),
        str(cell["repeat"]),
        str(cell["seed"]),
        repr(m.priority_max_idleness),
        repr(m.graph_max_idleness),
        repr(m.idleness_ratio) if m.idleness_ratio is not None else "",
    ]


def build_sweep_cells(args):
    graphs = args.graphs.split(",")
    sizes = [int(x) for x in args.sizes.split(",")]
    agents = [int(x) for x in args.agents_list.split(",")]
    hops = [int(x) for x in args.hops_list.split(",")]
    variants = args.variants.split(",")
    cells = []
    for gspec in graphs:
        for size in sizes:
            for k in agents:
                for h in hops:
                    for variant in variants:
                        for rep in range(args.repeats):
                            cells.append(
                                {
                                    "graph": gspec,
                                    "priority": f"auto:{size}",
                                    "agents": k,
                                    "hops": h,
                                    "variant": variant,
                                    "sample_n": args.sample_n
                                    if variant == "sampled"
                                    else None,
                                    "repeat": rep,
                                    "seed": args.seed + rep,
                                    "speed": args.speed,
                                    "horizon": args.horizon,
                                    "lib_cache": args.lib_cache,
                                }
                            )
    return cells


def cmd_sweep(args):
    if "sampled" in args.variants.split(",") and args.sample_n is None:
        raise ValidationError("--sample-n is required when sweeping 'sampled'")
    cells = build_sweep_cells(args)
    rows = [None] * len(cells)
    failures = []

    def record(i, result, err):
        if err is None:
            rows[i] = result
        else:
            failures.append({"cell": {k: v for k, v in cells[i].items()
                                      if k != "lib_cache"}, "error": str(err)})

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for i, result in enumerate(pool.map(_sweep_cell_safe, cells)):
                record(i, *result)
    else:
        for i, cell in enumerate(cells):
            record(i, *_sweep_cell_safe(cell))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(r for r in rows if r is not None)
    if failures:
        with open(out / "failures.json", "w") as fh:
            json.dump(failures, fh, indent=2)
        print(f"{len(failures)} cells failed; see failures.json", file=sys.stderr)
    print(f"wrote {sum(r is not None for r in rows)} rows to {out / 'sweep.csv'}")
    return 0


def _sweep_cell_safe(cell):
    try:
        return _sweep_cell(cell), None
    except PatrolError as exc:
        return None, exc


def cmd_libstats(args):
    g = resolve_graph(args.graph, args.priority, args.speed)
    spt = all_pairs_shortest_paths(g)
    hops_list = [int(x) for x in args.hops_list.split(",")]
    report = {"graph": args.graph, "priority": list(g.priority), "per_hops": []}
    lib = None
    for h in hops_list:
        lib = get_library(g, h, cache_dir=args.lib_cache,
                          mem_cap=args.mem_cap, spt=spt)
        report["per_hops"].append(
            {"hops": h, **{k: v for k, v in lib.stats.items()}}
        )
        print(
            f"H={h}: {lib.stats['total']} walks, "
            f"~{lib.stats['estimated_bytes']} bytes"
        )
    if args.bench and lib is not None:
        report["decision_time_us"] = bench_decision_times(
            g, lib, calls=args.bench_calls, seed=args.seed
        )
        for variant, mean_us in report["decision_time_us"].items():
            print(f"{variant}: mean assign_walk {mean_us:.1f} us")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "libstats.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return 0


def bench_decision_times(g, lib, calls=100, seed=0):
    """Mean assign_walk wall time per variant over identical random states."""
    rng = random.Random(seed)
    states = []
    for _ in range(calls):
        idl = IdlenessTable(g.n_nodes)
        t = rng.randrange(10**6, 10**9)
        idl.last_visit = np.array(
            [rng.randrange(0, t) for _ in range(g.n_nodes)], dtype=np.int64
        )
        states.append((idl, t, rng.choice(g.priority)))
    results = {}
    for variant in VARIANTS:
        policy = PolicyState(
            variant=variant,
            priority=g.priority,
            sample_n=max(1, len(g.priority) // 2) if variant == "sampled" else None,
            seed=seed,
        )
        start = _time.perf_counter()
        for idl, t, source in states:
            assign_walk(lib, source, idl, t, policy)
        results[variant] = (_time.perf_counter() - start) / calls * 1e6
    return results


def build_parser():
    parser = argparse.ArgumentParser(
        prog="priority-patrol",
        description="Priority patrolling simulator with rabbit-walk routes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation")
    _add_common(p_run)
    p_run.add_argument("--agents", type=int, default=int(_env("agents", 2)))
    p_run.add_argument("--start-nodes", default=_env("start_nodes"))
    p_run.add_argument("--hops", type=int, default=int(_env("hops", 3)))
    p_run.add_argument("--variant", choices=VARIANTS,
                       default=_env("variant", "greedy"))
    p_run.add_argument("--sample-n", type=int,
                       default=int(_env("sample_n", 0)) or None)
    p_run.add_argument("--horizon", type=float,
                       default=float(_env("horizon", 20000.0)),
                       help="simulated seconds")
    p_run.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p_run.add_argument("--out", default=_env("out", "out"))
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a full parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--graphs", default=_env("graphs", "grid5"),
                         help="comma-separated graph specs")
    p_sweep.add_argument("--sizes", default=_env("sizes", "4,5,6"),
                         help="priority-set sizes")
    p_sweep.add_argument("--agents-list", default=_env("agents_list", "2,3,4"))
    p_sweep.add_argument("--hops-list", default=_env("hops_list", "0,3,5"))
    p_sweep.add_argument("--variants",
                         default=_env("variants", ",".join(VARIANTS)))
    p_sweep.add_argument("--sample-n", type=int,
                         default=int(_env("sample_n", 0)) or None)
    p_sweep.add_argument("--repeats", type=int, default=int(_env("repeats", 3)))
    p_sweep.add_argument("--horizon", type=float,
                         default=float(_env("horizon", 2000.0)))
    p_sweep.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p_sweep.add_argument("--workers", type=int, default=int(_env("workers", 1)))
    p_sweep.add_argument("--out", default=_env("out", "out"))
    p_sweep.set_defaults(func=cmd_sweep)

    p_lib = sub.add_parser("libstats", help="walk-library size and timing report")
    _add_common(p_lib)
    p_lib.add_argument("--hops-list", default=_env("hops_list", "0,3,5"))
    p_lib.add_argument("--bench", action="store_true",
                       help="microbenchmark assign_walk per variant")
    p_lib.add_argument("--bench-calls", type=int, default=100)
    p_lib.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p_lib.add_argument("--out", default=_env("out"))
    p_lib.set_defaults(func=cmd_libstats)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "variant", None) == "sampled" and args.sample_n is None:
        parser.error("--sample-n is required with --variant sampled")
    try:
        return args.func(args)
    except PatrolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Generate rabbit-walk route libraries and watch them grow with H.

A rabbit walk runs between two priority nodes in three hops: a depth-H
exploratory walk that never reuses a road segment, then shortest paths to
and from an intermediate node the first hop did not touch. H is the
resource knob: the library grows exponentially with it.
"""

from priority_patrol import (
    all_pairs_shortest_paths,
    build_walk_library,
    generate_first_hops,
    make_grid,
    validate_walk,
)

grid = make_grid(5, 5, 50.0, priority=(0, 4, 20, 24))
spt = all_pairs_shortest_paths(grid)

print("first-hop counts from corner node 0:")
for depth in range(6):
    hops = generate_first_hops(grid, 0, depth)
    print(f"  H={depth}: {len(hops):4d} candidate first hops (<= 4^H = {4**depth})")

print("\nlibrary size and memory estimate per H:")
for depth in (0, 3, 5):
    lib = build_walk_library(grid, spt, depth)
    s = lib.stats
    print(
        f"  H={depth}: {s['total']:6d} walks, ~{s['estimated_bytes']:9d} bytes, "
        f"per source {s['per_source']}"
    )

lib = build_walk_library(grid, spt, 3)
walk = lib.bucket(0, 24)[0]
print(f"\na walk from 0 to 24 (H=3, via {walk.via}):")
print(f"  hop1 {walk.hop1}\n  hop2 {walk.hop2}\n  hop3 {walk.hop3}")
print(f"  duration {walk.duration / 1e6} s")
ok, violations = validate_walk(grid, walk, spt)
print(f"  structurally valid: {ok} {violations}")

#!/usr/bin/env python3
"""Generates the desk-scale benchmark data shipped under data/.

Produces a 32x32 map with exactly 205 blocked cells (20% of 1024, rounded)
whose free cells form a single connected component, plus scenario files with
distinct starts/goals sampled from that component. The optimal-length column
holds the exact 4-connected BFS distance. Deterministic for a fixed seed.
"""

import collections
import random
import sys
from pathlib import Path

WIDTH = HEIGHT = 32
BLOCKED = 205
NUM_SCENS = 12
ROWS_PER_SCEN = 60
SEED = 20240513


def connected(blocked_set):
    free = [(r, c) for r in range(HEIGHT) for c in range(WIDTH) if (r, c) not in blocked_set]
    if not free:
        return False
    seen = {free[0]}
    queue = collections.deque([free[0]])
    while queue:
        r, c = queue.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            n = (r + dr, c + dc)
            if 0 <= n[0] < HEIGHT and 0 <= n[1] < WIDTH and n not in blocked_set and n not in seen:
                seen.add(n)
                queue.append(n)
    return len(seen) == len(free)


def bfs_dist(blocked_set, src):
    dist = {src: 0}
    queue = collections.deque([src])
    while queue:
        r, c = queue.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            n = (r + dr, c + dc)
            if 0 <= n[0] < HEIGHT and 0 <= n[1] < WIDTH and n not in blocked_set and n not in dist:
                dist[n] = dist[(r, c)] + 1
                queue.append(n)
    return dist


def main(out_dir):
    rng = random.Random(SEED)
    cells = [(r, c) for r in range(HEIGHT) for c in range(WIDTH)]
    attempt = 0
    while True:
        attempt += 1
        blocked = set(rng.sample(cells, BLOCKED))
        if connected(blocked):
            break
    print(f"connected layout found on attempt {attempt}")

    out_dir.mkdir(parents=True, exist_ok=True)
    map_name = "random-32-32-20.map"
    with open(out_dir / map_name, "w", newline="\n") as f:
        f.write("type octile\n")
        f.write(f"height {HEIGHT}\n")
        f.write(f"width {WIDTH}\n")
        f.write("map\n")
        for r in range(HEIGHT):
            f.write("".join("@" if (r, c) in blocked else "." for c in range(WIDTH)) + "\n")

    free = sorted((r, c) for r, c in cells if (r, c) not in blocked)
    for scen_idx in range(1, NUM_SCENS + 1):
        starts = rng.sample(free, ROWS_PER_SCEN)
        goals = rng.sample(free, ROWS_PER_SCEN)
        with open(out_dir / f"random-32-32-20-gen-{scen_idx}.scen", "w", newline="\n") as f:
            f.write("version 1\n")
            for i, (start, goal) in enumerate(zip(starts, goals)):
                dist = bfs_dist(blocked, start)[goal]
                f.write(
                    f"{i // 10}\t{map_name}\t{WIDTH}\t{HEIGHT}\t"
                    f"{start[1]}\t{start[0]}\t{goal[1]}\t{goal[0]}\t{dist}\n"
                )
    print(f"wrote {map_name} and {NUM_SCENS} scenario files to {out_dir}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "data"))

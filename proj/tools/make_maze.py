#!/usr/bin/env python3
"""Writes a corridor-maze scenario: a perfect maze on a square cell grid with
some extra walls knocked out so it has loops."""

import argparse
import random


def carve(n, rng):
    """Depth-first maze. Returns the set of open passages as cell pairs."""
    seen = {(0, 0)}
    stack = [(0, 0)]
    open_edges = set()
    while stack:
        x, y = stack[-1]
        nbrs = [(x + dx, y + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                if 0 <= x + dx < n and 0 <= y + dy < n and (x + dx, y + dy) not in seen]
        if not nbrs:
            stack.pop()
            continue
        nxt = rng.choice(nbrs)
        open_edges.add(frozenset(((x, y), nxt)))
        seen.add(nxt)
        stack.append(nxt)
    return open_edges


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells", type=int, default=8)
    ap.add_argument("--pitch", type=float, default=2.4)
    ap.add_argument("--wall", type=float, default=0.4)
    ap.add_argument("--size", type=float, default=20.0)
    ap.add_argument("--height", type=float, default=2.5)
    ap.add_argument("--loops", type=float, default=0.25, help="fraction of interior walls removed")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    n = args.cells
    open_edges = carve(n, rng)
    walls = []
    for x in range(n):
        for y in range(n):
            for nxt in ((x + 1, y), (x, y + 1)):
                if nxt[0] < n and nxt[1] < n and frozenset(((x, y), nxt)) not in open_edges:
                    walls.append(((x, y), nxt))
    rng.shuffle(walls)
    walls = sorted(walls[int(len(walls) * args.loops):])

    p, w, h = args.pitch, args.wall, args.height
    print(f"# {args.size:g} x {args.size:g} x {h:g} m corridor maze, {n}x{n} cells, seed {args.seed}")
    print(f"bounds 0 0 0 {args.size:g} {args.size:g} {h:g}")
    for (x, y), (nx, ny) in walls:
        if nx != x:  # wall between horizontally adjacent cells
            x0 = p * nx
            print(f"box {x0:g} {p * y:g} 0 {x0 + w:g} {min(p * (y + 1) + w, args.size):g} {h:g}")
        else:
            y0 = p * ny
            print(f"box {p * x:g} {y0:g} 0 {min(p * (x + 1) + w, args.size):g} {y0 + w:g} {h:g}")
    cx = p * (n // 2) + (p + w) / 2
    print(f"start {cx:g} {cx:g} 1.2 0")
    print("resolution 0.2")
    print("fov_h_deg 115")
    print("fov_v_deg 60")
    print("d_max 5")


if __name__ == "__main__":
    main()

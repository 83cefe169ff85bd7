#!/usr/bin/env python3
"""Writes the loop-heavy evaluation suite into worlds/suite/.

Every world is a text grid plus an .objects.json sidecar. Layouts are
block-city, ring, figure-eight and room-cycle variants; a few goals move
along a corridor. Output is fully determined by the fixed seed below.
"""
import json
import random
import sys
from collections import deque
from pathlib import Path

SEED = 20240611
LABELS = ["sofa", "table", "plant", "bed", "tv"]


def empty(w, h):
    g = [["."] * w for _ in range(h)]
    for x in range(w):
        g[0][x] = g[h - 1][x] = "#"
    for y in range(h):
        g[y][0] = g[y][w - 1] = "#"
    return g


def fill(g, x0, y0, x1, y1):
    for y in range(y0, y1):
        for x in range(x0, x1):
            g[y][x] = "#"


def block_city(rng, w, h):
    g = empty(w, h)
    bw, bh = rng.choice([2, 3]), rng.choice([2, 3])
    gap = rng.choice([1, 2])
    y = 1 + gap
    while y + bh < h - 1:
        x = 1 + gap
        while x + bw < w - 1:
            fill(g, x, y, x + bw, y + bh)
            x += bw + gap
        y += bh + gap
    return g


def ring(rng, w, h):
    g = empty(w, h)
    c = rng.choice([1, 2])
    fill(g, 1 + c, 1 + c, w - 1 - c, h - 1 - c)
    return g


def figure_eight(rng, w, h):
    g = empty(w, h)
    c = rng.choice([1, 2])
    mid = w // 2
    fill(g, 1 + c, 1 + c, mid - c // 2 - 1 + (1 if c == 1 else 0), h - 1 - c)
    fill(g, mid + 1, 1 + c, w - 1 - c, h - 1 - c)
    return g


def room_cycle(rng, w, h):
    g = empty(w, h)
    mx, my = w // 2, h // 2
    for y in range(h):
        g[y][mx] = "#"
    for x in range(w):
        g[my][x] = "#"
    # one door in each of the four internal wall segments closes a cycle through all rooms
    g[rng.randint(1, my - 1)][mx] = "."
    g[rng.randint(my + 1, h - 2)][mx] = "."
    g[my][rng.randint(1, mx - 1)] = "."
    g[my][rng.randint(mx + 1, w - 2)] = "."
    # a pillar per room adds inner loops
    for (x0, y0, x1, y1) in [(1, 1, mx, my), (mx + 1, 1, w - 1, my), (1, my + 1, mx, h - 1), (mx + 1, my + 1, w - 1, h - 1)]:
        if x1 - x0 >= 5 and y1 - y0 >= 5:
            px, py = (x0 + x1) // 2, (y0 + y1) // 2
            fill(g, px - 1, py - 1, px + 1, py + 1)
    return g


LAYOUTS = [("city", block_city), ("ring", ring), ("eight", figure_eight), ("rooms", room_cycle)]


def free_cells(g):
    return [(x, y) for y in range(len(g)) for x in range(len(g[0])) if g[y][x] == "."]


def bfs(g, s):
    dist = {s: 0}
    q = deque([s])
    while q:
        x, y = q.popleft()
        for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if n not in dist and 0 <= n[1] < len(g) and 0 <= n[0] < len(g[0]) and g[n[1]][n[0]] != "#":
                dist[n] = dist[(x, y)] + 1
                q.append(n)
    return dist


def walk_away(g, start, dist, rng, length=12):
    """A 4-connected walk of up to `length` cells from `start`, each step one
    cell farther from the agent's start. A goal pacing along it is never
    closer to the start than its initial cell."""
    path, cur = [], start
    for _ in range(length):
        x, y = cur
        nxt = [n for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))
               if g[n[1]][n[0]] == "." and dist.get(n, -1) == dist[cur] + 1]
        if not nxt:
            break
        cur = rng.choice(nxt)
        path.append(cur)
    return path


def make(index, rng):
    name, fn = LAYOUTS[index % len(LAYOUTS)]
    w, h = rng.choice([(14, 10), (16, 12), (18, 12), (16, 14)])
    g = fn(rng, w, h)
    cells = free_cells(g)
    s = rng.choice(cells)
    dist = bfs(g, s)
    moving = index % 3 == 2
    far = sorted((d, c) for c, d in dist.items() if c != s)
    cut = far[len(far) // 2 if moving else len(far) * 2 // 3][0]
    g_cell = rng.choice([c for d, c in far if d >= cut])
    side = {
        "resolution": 1.0,
        "start_heading_deg": 30 * rng.randrange(12),
        "goal": {"label": "chair", "feature_seed": rng.randrange(1000)},
        "objects": [],
    }
    if moving:
        run = walk_away(g, g_cell, dist, rng)
        if run:
            side["goal"]["waypoints"] = [list(c) for c in run]
            side["goal"]["steps_per_cell"] = 3
    taken = {s, g_cell} | {tuple(c) for c in side["goal"].get("waypoints", [])}
    for k in range(rng.randint(1, 2)):
        # look-alike chairs: close enough to pass the goal test through range noise
        c = rng.choice([c for c in cells if c not in taken and dist[c] < dist[g_cell]])
        taken.add(c)
        side["objects"].append({"label": "chair", "cell": list(c), "feature_seed": 1000 + rng.randrange(1000),
                                "lookalike": round(rng.uniform(0.55, 0.65), 2)})
    for k in range(rng.randint(1, 3)):
        c = rng.choice([c for c in cells if c not in taken])
        taken.add(c)
        side["objects"].append({"label": rng.choice(LABELS), "cell": list(c), "feature_seed": 1000 + rng.randrange(1000)})
    g[s[1]][s[0]] = "S"
    g[g_cell[1]][g_cell[0]] = "G"
    stem = f"{index + 1:02d}_{name}"
    return stem, "".join("".join(r) + "\n" for r in g), side


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "worlds" / "suite"
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    for i in range(20):
        stem, grid, side = make(i, rng)
        (out / f"{stem}.world").write_text(grid)
        (out / f"{stem}.objects.json").write_text(json.dumps(side, indent=2) + "\n")


if __name__ == "__main__":
    main()

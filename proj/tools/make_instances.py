#!/usr/bin/env python3
"""Writes the bundled instances under data/.

Everything here is synthetic. The town instance has 8 candidate shelters of
1000 vph, 1000 vph roads at 100% saturation, a 35 mph free-flow speed, 48
origin zones and scenario totals of 1300/2200/2200/4000 vehicles, laid out on
an invented street grid.

Usage: tools/make_instances.py [output_dir]
"""

import json
import math
import random
import sys
from pathlib import Path

SPEED_MPH = 35.0


def write_instance(root, name, nodes, links, shelters, scenarios, config=None, note=""):
    d = root / name
    (d / "network").mkdir(parents=True, exist_ok=True)
    with open(d / "network" / "nodes.csv", "w") as f:
        f.write("id,kind\n")
        for nid, kind in nodes:
            f.write(f"{nid},{kind}\n")
    use_length = any("length_mi" in l for l in links)
    with open(d / "network" / "links.csv", "w") as f:
        if use_length:
            f.write("id,from,to,capacity_vph,free_flow_min,length_mi,max_saturation\n")
        else:
            f.write("id,from,to,capacity_vph,free_flow_min,max_saturation\n")
        for l in links:
            ff = l.get("free_flow_min", "")
            if use_length:
                f.write(f"{l['id']},{l['from']},{l['to']},{l['cap']},{ff},{l.get('length_mi', '')},{l.get('sat', 1.0)}\n")
            else:
                f.write(f"{l['id']},{l['from']},{l['to']},{l['cap']},{ff},{l.get('sat', 1.0)}\n")
    with open(d / "shelters.csv", "w") as f:
        f.write("node_id,capacity_vph\n")
        for sid, cap in shelters:
            f.write(f"{sid},{cap}\n")
    (d / "scenarios").mkdir(exist_ok=True)
    for i, sc in enumerate(scenarios, 1):
        with open(d / "scenarios" / f"{i}_{sc['name']}.json", "w") as f:
            json.dump(sc, f, indent=2)
            f.write("\n")
    if config:
        with open(d / "config.txt", "w") as f:
            if note:
                f.write(f"# {note}\n")
            for k, v in config.items():
                f.write(f"{k} = {v}\n")


def two_way(links, a, b, cap, minutes, prefix=""):
    n = len(links)
    links.append({"id": f"{prefix}{n + 1}", "from": a, "to": b, "cap": cap, "free_flow_min": minutes})
    links.append({"id": f"{prefix}{n + 2}", "from": b, "to": a, "cap": cap, "free_flow_min": minutes})


def one_way(links, a, b, cap, minutes, prefix=""):
    n = len(links)
    links.append({"id": f"{prefix}{n + 1}", "from": a, "to": b, "cap": cap, "free_flow_min": minutes})


# ------------------------------------------------------------------ small

def small_instances(root):
    # One link, one shelter.
    write_instance(root, "tiny", [("o1", "origin"), ("s1", "shelter")],
                   [{"id": "l1", "from": "o1", "to": "s1", "cap": 1000, "free_flow_min": 10}],
                   [("s1", 1000)], [{"name": "base", "productions": {"o1": 500}}])

    # Two mirrored paths to two identical shelters.
    nodes = [("o1", "origin"), ("a", "intermediate"), ("b", "intermediate"), ("s1", "shelter"), ("s2", "shelter")]
    links = [
        {"id": "l1", "from": "o1", "to": "a", "cap": 600, "free_flow_min": 5},
        {"id": "l2", "from": "a", "to": "s1", "cap": 600, "free_flow_min": 5},
        {"id": "l3", "from": "o1", "to": "b", "cap": 600, "free_flow_min": 5},
        {"id": "l4", "from": "b", "to": "s2", "cap": 600, "free_flow_min": 5},
    ]
    write_instance(root, "symmetric", nodes, links, [("s1", 1000), ("s2", 1000)],
                   [{"name": "base", "productions": {"o1": 800}}])

    # Three nodes, two shelters; s1 -> s2 only matters while s1 is closed.
    nodes = [("o1", "origin"), ("s1", "shelter"), ("s2", "shelter")]
    links = [
        {"id": "l1", "from": "o1", "to": "s1", "cap": 300, "free_flow_min": 4},
        {"id": "l2", "from": "o1", "to": "s2", "cap": 600, "free_flow_min": 6},
        {"id": "l3", "from": "s1", "to": "s2", "cap": 500, "free_flow_min": 2},
    ]
    write_instance(root, "triangle", nodes, links, [("s1", 1000), ("s2", 1000)],
                   [{"name": "base", "productions": {"o1": 900}}],
                   config={"impedance.beta": 0.5})

    # Two origins sharing a junction; six routes in total.
    nodes = [("o1", "origin"), ("o2", "origin"), ("m", "intermediate"), ("s1", "shelter"), ("s2", "shelter")]
    links = [
        {"id": "l1", "from": "o1", "to": "m", "cap": 400, "free_flow_min": 2},
        {"id": "l2", "from": "o2", "to": "m", "cap": 400, "free_flow_min": 3},
        {"id": "l3", "from": "m", "to": "s1", "cap": 500, "free_flow_min": 3},
        {"id": "l4", "from": "m", "to": "s2", "cap": 500, "free_flow_min": 2},
        {"id": "l5", "from": "o1", "to": "s1", "cap": 300, "free_flow_min": 6},
        {"id": "l6", "from": "o2", "to": "s2", "cap": 300, "free_flow_min": 6},
    ]
    write_instance(root, "junction", nodes, links, [("s1", 1000), ("s2", 1000)],
                   [{"name": "base", "productions": {"o1": 500, "o2": 400}}],
                   config={"impedance.beta": 1})


# ------------------------------------------------------------------- desk

def desk_instance(root, name, seed, n_shelters, n_origins, n_inner, beta, capacity_range, demand_range):
    """Ring of intermediate nodes with origins inside and shelters outside."""
    rng = random.Random(seed)
    nodes = [(f"o{i + 1}", "origin") for i in range(n_origins)]
    nodes += [(f"n{i + 1}", "intermediate") for i in range(n_inner)]
    nodes += [(f"s{i + 1}", "shelter") for i in range(n_shelters)]
    links = []
    for i in range(n_inner):
        two_way(links, f"n{i + 1}", f"n{(i + 1) % n_inner + 1}", 1000, round(rng.uniform(1.5, 4.0), 2), "l")
    for i in range(n_origins):
        targets = rng.sample(range(n_inner), 2)
        for t in targets:
            one_way(links, f"o{i + 1}", f"n{t + 1}", 1000, round(rng.uniform(0.5, 2.0), 2), "l")
    for j in range(n_shelters):
        t = round(j * n_inner / n_shelters) % n_inner
        two_way(links, f"n{t + 1}", f"s{j + 1}", rng.choice([400, 600, 800]), round(rng.uniform(1.0, 6.0), 2), "l")
    shelters = [(f"s{j + 1}", rng.choice(capacity_range)) for j in range(n_shelters)]
    productions = {f"o{i + 1}": rng.randint(*demand_range) for i in range(n_origins)}
    write_instance(root, name, nodes, links, shelters, [{"name": "base", "productions": productions}],
                   config={"impedance.beta": beta})


# ------------------------------------------------------------------- town

def largest_remainder(weights, total):
    s = sum(weights)
    raw = [w / s * total for w in weights]
    base = [math.floor(r) for r in raw]
    rest = total - sum(base)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - base[i]), i))
    for i in order[:rest]:
        base[i] += 1
    return base


def town_instance(root):
    rng = random.Random(2011)
    cols, rows = 6, 5
    spacing_mi = 0.35
    grid = {(c, r): f"g{r * cols + c + 1}" for r in range(rows) for c in range(cols)}
    nodes = []
    links = []

    def add_road(a, b, length):
        for u, v in ((a, b), (b, a)):
            links.append({"id": f"r{len(links) + 1}", "from": u, "to": v, "cap": 1000,
                          "length_mi": round(length, 3)})

    for (c, r), g in sorted(grid.items(), key=lambda kv: kv[1]):
        nodes.append((g, "intermediate"))
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                add_road(grid[(c, r)], grid[(c + 1, r)], spacing_mi * rng.uniform(0.9, 1.3))
            if r + 1 < rows:
                add_road(grid[(c, r)], grid[(c, r + 1)], spacing_mi * rng.uniform(0.9, 1.3))

    # 48 zones on a jittered 8 x 6 lattice: downtown in the middle,
    # commercial to the east, homes elsewhere.
    zones = []
    for z in range(48):
        c = (z % 8 + 0.5) / 8 * (cols - 1) + rng.uniform(-0.2, 0.2)
        r = (z // 8 + 0.5) / 6 * (rows - 1) + rng.uniform(-0.2, 0.2)
        if abs(c - 2.5) < 1.0 and abs(r - 2.0) < 0.9:
            kind = "downtown"
        elif c > 3.6:
            kind = "commercial"
        else:
            kind = "residential"
        zones.append((f"z{z + 1}", c, r, kind))
        nodes.append((f"z{z + 1}", "origin"))
    for zid, c, r, _ in zones:
        near = sorted(grid.items(), key=lambda kv: (kv[0][0] - c) ** 2 + (kv[0][1] - r) ** 2)[:2]
        for (gc, gr), g in near:
            d = math.hypot(gc - c, gr - r) * spacing_mi + 0.05
            links.append({"id": f"c{len(links) + 1}", "from": zid, "to": g, "cap": 1000, "length_mi": round(d, 3)})

    # Eight exits on the perimeter, each reached from two grid nodes.
    exits = [((0, 0), (1, 0)), ((2, 0), (3, 0)), ((4, 0), (5, 0)), ((5, 1), (5, 2)),
             ((5, 3), (5, 4)), ((3, 4), (2, 4)), ((0, 4), (1, 4)), ((0, 2), (0, 3))]
    shelters = []
    for j, (a, b) in enumerate(exits):
        sid = f"s{j + 1}"
        nodes.append((sid, "shelter"))
        for cell in (a, b):
            links.append({"id": f"e{len(links) + 1}", "from": grid[cell], "to": sid, "cap": 1000,
                          "length_mi": round(rng.uniform(0.25, 0.45), 3)})
        shelters.append((sid, 1000))

    profiles = {
        "day": (1300, {"downtown": 1.5, "commercial": 3.0, "residential": 0.6}),
        "night": (2200, {"downtown": 1.0, "commercial": 0.3, "residential": 2.0}),
        "weekend": (2200, {"downtown": 2.2, "commercial": 0.4, "residential": 1.6}),
        "vacation": (4000, {"downtown": 2.2, "commercial": 0.8, "residential": 1.2}),
    }
    scenarios = []
    for name, (total, w) in profiles.items():
        weights = [w[kind] * rng.uniform(0.8, 1.2) for _, _, _, kind in zones]
        counts = largest_remainder(weights, total)
        scenarios.append({"name": name, "productions": {zid: n for (zid, _, _, _), n in zip(zones, counts)}})
    write_instance(root, "town", nodes, links, shelters, scenarios,
                   config={"impedance.beta": 10, "assignment.step_rule": "exact-line-search",
                           "assignment.gap_tolerance": 1e-4},
                   note="synthetic town on an invented street grid")


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data")
    small_instances(root)
    desk_instance(root, "desk4", 11, 4, 3, 6, 0.6, [300, 400, 500], (150, 300))
    desk_instance(root, "desk5", 12, 5, 4, 6, 0.8, [300, 400, 500], (100, 250))
    desk_instance(root, "desk6", 13, 6, 4, 5, 1.0, [250, 350, 450], (120, 260))
    town_instance(root)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Generate the bundled branched-manifold datasets.

The 2D dataset is a figure-eight branched surface: two triangulated bands,
each wrapping a triangular-hole "eye", glued along a middle strip; one extra
sheet per band is attached along the top edge of the strip, so that edge has
three triangle cofaces (the branch line).  The bundled multivector field
sends the strip and band cells around both eyes through the branch line (one
large recurrent set containing every triangle), keeps each eye's boundary
circle as a cycle of vertex-edge pairs, and leaves the bottom edge of the
strip as a critical singleton whose endpoints feed the two circles.

The 3D dataset is a cubical complex: a middle block of cube cells with two
square handles, carrying a circulation that splits at the middle and loops
through either handle.

Usage: python tools/gen_lorenz.py [outdir]
"""

import json
import sys
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from orbicert.cellcomplex import CellComplex, simplex_id
from orbicert.homology import conley_index_pair
from orbicert.mvf import MultivectorField, find_invariant_sets

# vertex labels -> integer ids
NAMES = [
    "A", "B", "M", "N", "W", "V",
    "L0", "L1", "L2", "L3", "R0", "R1", "R2", "R3",
    "P1", "P2", "P3", "Q1", "Q2", "Q3",
]
VID = {n: i for i, n in enumerate(NAMES)}


def tri(a, b, c):
    return tuple(sorted((VID[a], VID[b], VID[c])))


def edge(a, b):
    return simplex_id((VID[a], VID[b]))


def vert(a):
    return simplex_id((VID[a],))


TRIANGLES = {
    # middle strip, fan from M over the hexagon [A, B, N, R0, L0, M]
    "tau": tri("A", "B", "M"),
    "S2": tri("M", "B", "N"),
    "S3": tri("M", "N", "R0"),
    "S4": tri("M", "R0", "L0"),
    # sheets attached along the branch edge (A, B)
    "sig1": tri("A", "B", "P1"),
    "sig2": tri("A", "B", "Q1"),
    # left band: annulus between circle [L0..L3] and outer [W, M, A, P1, P2, P3]
    "TB0": tri("L0", "L1", "W"),
    "TB1": tri("L1", "W", "M"),
    "TB2": tri("L1", "M", "A"),
    "TB3": tri("L1", "L2", "A"),
    "TB4": tri("L2", "A", "P1"),
    "TB5": tri("L2", "P1", "P2"),
    "TB6": tri("L2", "L3", "P2"),
    "TB7": tri("L3", "P2", "P3"),
    "TB8": tri("L3", "L0", "P3"),
    "TB9": tri("L0", "P3", "W"),
    # right band: annulus between [R0..R3] and outer [V, N, B, Q1, Q2, Q3]
    "UB0": tri("R0", "R1", "V"),
    "UB1": tri("R1", "V", "N"),
    "UB2": tri("R1", "N", "B"),
    "UB3": tri("R1", "R2", "B"),
    "UB4": tri("R2", "B", "Q1"),
    "UB5": tri("R2", "Q1", "Q2"),
    "UB6": tri("R2", "R3", "Q2"),
    "UB7": tri("R3", "Q2", "Q3"),
    "UB8": tri("R3", "R0", "Q3"),
    "UB9": tri("R0", "Q3", "V"),
}


def build_lorenz2d():
    cx = CellComplex.from_simplices(TRIANGLES.values())
    tid = {k: simplex_id(v) for k, v in TRIANGLES.items()}

    # ift-style assignment: cell id -> multivector key
    assign = {}
    for k, v in tid.items():
        assign[v] = k

    def put(cell, key):
        assert cell in cx.dims, cell
        assign[cell] = key

    # strip flow: tau -> S2 -> S3 -> S4, draining to the saddle edge
    put(edge("A", "B"), "tau")
    put(edge("M", "A"), "tau")
    put(vert("A"), "tau")
    put(edge("M", "B"), "S2")
    put(edge("M", "N"), "S3")
    put(edge("N", "R0"), "S3")
    put(vert("N"), "S3")
    put(edge("M", "R0"), "S4")
    put(edge("L0", "M"), "S4")
    # saddle: the strip's bottom edge alone
    put(edge("L0", "R0"), "saddle")
    # eye circles as vertex-edge pair cycles
    for c, n in (("L", 4), ("R", 4)):
        for i in range(n):
            put(vert(f"{c}{i}"), f"circ{c}{i}")
            put(edge(f"{c}{i}", f"{c}{(i + 1) % n}"), f"circ{c}{i}")
    # left band wrap: tau -> M -> TB1 -> TB0 -> TB9 -> ... -> TB4 -> sig1
    put(vert("M"), "TB1")
    put(edge("L1", "M"), "TB1")
    put(edge("W", "M"), "TB1")
    put(edge("L1", "W"), "TB0")
    put(edge("L0", "W"), "TB9")
    put(edge("P3", "W"), "TB9")
    put(vert("W"), "TB9")
    put(edge("L0", "P3"), "TB8")
    put(edge("L3", "P3"), "TB7")
    put(edge("P2", "P3"), "TB7")
    put(vert("P3"), "TB7")
    put(edge("L3", "P2"), "TB6")
    put(edge("L2", "P2"), "TB5")
    put(edge("P1", "P2"), "TB5")
    put(vert("P2"), "TB5")
    put(edge("L2", "P1"), "TB4")
    put(edge("L2", "A"), "TB3")
    put(edge("L1", "A"), "TB2")
    put(edge("A", "P1"), "sig1")
    put(edge("B", "P1"), "sig1")
    put(vert("P1"), "sig1")
    # right band wrap: S2 -> (B,N) -> UB2 -> UB1 -> UB0 -> UB9 ... -> UB4 -> sig2
    put(edge("B", "N"), "UB2")
    put(edge("R1", "B"), "UB2")
    put(vert("B"), "UB2")
    put(edge("R1", "N"), "UB1")
    put(edge("N", "V"), "UB1")
    put(edge("R1", "V"), "UB0")
    put(edge("R0", "V"), "UB9")
    put(edge("Q3", "V"), "UB9")
    put(vert("V"), "UB9")
    put(edge("R0", "Q3"), "UB8")
    put(edge("R3", "Q3"), "UB7")
    put(edge("Q2", "Q3"), "UB7")
    put(vert("Q3"), "UB7")
    put(edge("R3", "Q2"), "UB6")
    put(edge("R2", "Q2"), "UB5")
    put(edge("Q1", "Q2"), "UB5")
    put(vert("Q2"), "UB5")
    put(edge("R2", "Q1"), "UB4")
    put(edge("R2", "B"), "UB3")
    put(edge("A", "Q1"), "sig2")
    put(edge("B", "Q1"), "sig2")
    put(vert("Q1"), "sig2")

    groups = {}
    for cell, key in assign.items():
        groups.setdefault(key, []).append(cell)
    missing = cx.cells - set(assign)
    if missing:
        raise SystemExit(f"unassigned cells: {sorted(missing)}")
    mvf = MultivectorField(cx, [groups[k] for k in sorted(groups)])
    issues = mvf.validate()
    if issues:
        raise SystemExit("invalid lorenz mvf: " + "; ".join(issues))
    return cx, mvf


def check_lorenz2d(cx, mvf):
    branch = edge("A", "B")
    cofaces = cx.star(branch) - {branch}
    print(f"branch edge {branch}: {len(cofaces)} triangle cofaces")
    found, md = find_invariant_sets(cx, mvf)
    print(f"morse sets: {len(md.nodes)}")
    for i, n in enumerate(md.nodes):
        tops = n.cells & cx.toplexes()
        print(f"  M{i}: {len(n.cells)} cells ({len(tops)} toplexes), index {n.index}")
    print("  edges:", md.edges)
    return md


# -- 3D handle-and-block complex ------------------------------------------


def cube_cells(cubes):
    """Cubical complex cells for unit cubes given by their min corners."""
    cells = {}

    def add(intervals):
        cid = "x".join(f"{a}:{b}" if a != b else f"{a}" for a, b in intervals)
        cells[cid] = intervals
        return cid

    def faces(intervals):
        out = []
        sign = 1
        for d, (a, b) in enumerate(intervals):
            if a == b:
                continue
            for side, s in ((a, -sign), (b, sign)):
                sub = list(intervals)
                sub[d] = (side, side)
                out.append((tuple(sub), s))
            sign = -sign
        return out

    todo = []
    for cx0, cy0, cz0 in cubes:
        iv = ((cx0, cx0 + 1), (cy0, cy0 + 1), (cz0, cz0 + 1))
        add(iv)
        todo.append(iv)
    seen = set()
    while todo:
        iv = todo.pop()
        if iv in seen:
            continue
        seen.add(iv)
        for sub, _ in faces(iv):
            add(sub)
            todo.append(sub)

    out = []
    for cid, iv in cells.items():
        dim = sum(1 for a, b in iv if a != b)
        fs = []
        for sub, s in faces(iv):
            sid = "x".join(f"{a}:{b}" if a != b else f"{a}" for a, b in sub)
            fs.append({"id": sid, "sign": s})
        out.append({"id": cid, "dim": dim, "facets": fs})
    return out


def build_lorenz3d():
    left = [(x, y, 0) for x in (-1, 0, 1) for y in (0, 1, 2) if not (x == 0 and y == 1)]
    right = [(x, y, 0) for x in (4, 5, 6) for y in (0, 1, 2) if not (x == 5 and y == 1)]
    middle = [(x, y, 0) for x in (2, 3) for y in (0, 1)]
    cubes = left + middle + right
    cells = cube_cells(cubes)
    cx = CellComplex.from_cw(cells)

    def cid(x, y, z):
        return f"{x}:{x+1}x{y}:{y+1}x{z}:{z+1}"

    # circulation: middle top row feeds the bottom row, bottom row splits
    # into the handles, handles arch back into the top row
    succ = {}
    loop_left = [(1, 0), (0, 0), (-1, 0), (-1, 1), (-1, 2), (0, 2), (1, 2), (1, 1), (2, 1)]
    loop_right = [(4, 0), (5, 0), (6, 0), (6, 1), (6, 2), (5, 2), (4, 2), (4, 1), (3, 1)]
    for a, b in zip(loop_left, loop_left[1:]):
        succ[cid(a[0], a[1], 0)] = cid(b[0], b[1], 0)
    for a, b in zip(loop_right, loop_right[1:]):
        succ[cid(a[0], a[1], 0)] = cid(b[0], b[1], 0)
    succ[cid(2, 1, 0)] = cid(2, 0, 0)
    succ[cid(3, 1, 0)] = cid(3, 0, 0)
    succ[cid(2, 0, 0)] = cid(1, 0, 0)
    succ[cid(3, 0, 0)] = cid(4, 0, 0)
    # mixing faces: the two middle columns exchange across their shared walls
    cross = {
        f"3x0:1x0:1": cid(3, 0, 0),   # wall between (2,0) and (3,0) flows right
        f"3x1:2x0:1": cid(2, 1, 0),   # wall between (2,1) and (3,1) flows left
    }

    # linearize the circulation; lower cells go to their latest incident cube,
    # which is always a locally closed assignment, then a few walls are
    # flipped to close the loops and allow switching between them
    poset = cx.poset
    tops = sorted(cx.toplexes())
    ranked = loop_left[:-1] + loop_right[:-1] + [(2, 1), (3, 1), (2, 0), (3, 0)]
    flow_rank = {cid(p[0], p[1], 0): i for i, p in enumerate(ranked)}
    assert set(flow_rank) == set(tops)

    assign = {}
    for t in tops:
        assign[t] = t
    for c in sorted(cx.cells):
        if c not in assign:
            cubes_over = sorted(poset.opn([c]) & cx.toplexes())
            assign[c] = max(cubes_over, key=lambda t: flow_rank[t])

    def wall(a, b):
        shared = poset.closure([cid(*a, 0)]) & poset.closure([cid(*b, 0)])
        return max(shared, key=lambda c: cx.dims[c])

    flips = [
        (wall((2, 0), (1, 0)), cid(1, 0, 0)),   # close the left loop
        (wall((3, 0), (4, 0)), cid(4, 0, 0)),   # close the right loop
        (wall((2, 1), (3, 1)), cid(2, 1, 0)),   # right-to-left switching
    ]
    for c, target in flips:
        assign[c] = target

    def rebuild():
        groups = {}
        for cell, key in assign.items():
            groups.setdefault(key, []).append(cell)
        return MultivectorField(cx, [groups[k] for k in sorted(groups)])

    def violations():
        # (g, f): g assigned to some multivector whose mouth contains its
        # coface f, so the mouth is not closed at g
        groups = {}
        for cell, key in assign.items():
            groups.setdefault(key, set()).add(cell)
        out = []
        for key, v in groups.items():
            cl = poset.closure(v)
            for f in sorted(cl - v):
                for g in sorted(poset.closure([f]) - {f}):
                    if g in v:
                        out.append((g, f))
        return out

    for _ in range(60):
        bad = violations()
        if not bad:
            break
        done = set()
        for g, f in bad:
            if g not in done:
                assign[g] = assign[f]
                done.add(g)
    mvf = rebuild()
    issues = mvf.validate()
    if issues:
        raise SystemExit("invalid 3d mvf: " + "; ".join(issues[:6]))
    return cx, mvf


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "orbicert" / "data"
    )
    outdir.mkdir(parents=True, exist_ok=True)

    cx, mvf = build_lorenz2d()
    check_lorenz2d(cx, mvf)
    (outdir / "lorenz.complex.json").write_text(json.dumps(cx.to_json()))
    (outdir / "lorenz.mvf.json").write_text(json.dumps(mvf.to_json()))

    cx3, mvf3 = build_lorenz3d()
    found, md = find_invariant_sets(cx3, mvf3)
    print(f"3d block: {len(cx3)} cells, morse sets {len(md.nodes)}, "
          f"nontrivial {len(found)}")
    for n in md.nodes:
        print("  index", n.index, len(n.cells), "cells")
    (outdir / "lorenz3d.complex.json").write_text(json.dumps(cx3.to_json()))
    (outdir / "lorenz3d.mvf.json").write_text(json.dumps(mvf3.to_json()))
    print("written to", outdir)


if __name__ == "__main__":
    main()

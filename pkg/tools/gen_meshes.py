#!/usr/bin/env python3
"""Generate the bundled flow-transverse meshes and field files.

Meshes are rings of vertices around the origin joined by angular-merge
triangulation.  Ring radii avoid the radii where the flow runs tangent to
circles, ring shapes are optimized per vertex to keep every chord strictly
transverse, and each band's diagonal lean is picked by sampled margins.
The output is only kept after the library's rigorous validator reports every
edge and vertex determined, so nothing here needs to be trusted.

Usage: python tools/gen_meshes.py [outdir]
"""

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from orbicert.mvf import find_invariant_sets
from orbicert.pipeline import TriMesh, build_mvf, parse_vector_field, validate_mesh

TAU = 2.0 * math.pi

CIRCLES_FIELD = """\
# planar system with an unstable focus at the origin and invariant circles
-y + x*(x^2+y^2-4)*(x^2+y^2-1)
x + y*(x^2+y^2-4)*(x^2+y^2-1)
"""

VDP_FIELD = """\
# van der Pol oscillator, damping parameter 1
y
y*(1-x^2) - x
"""


def circle_ring(r_fn, m, offset):
    pts = []
    for k in range(m):
        th = (TAU * k / m + offset) % TAU
        r = r_fn(th)
        pts.append((r * math.cos(th), r * math.sin(th)))
    pts.sort(key=lambda p: math.atan2(p[1], p[0]) % TAU)
    return pts


def zipper(inner_pts, outer_pts, inner_idx, outer_idx, lean, tie_break):
    """Triangulate the band between two rings by angular merge.

    lean='bwd' mirrors the construction so the diagonals slant the other way
    relative to increasing angle.
    """
    if lean == "bwd":
        return zipper(
            [(x, -y) for x, y in reversed(inner_pts)],
            [(x, -y) for x, y in reversed(outer_pts)],
            list(reversed(inner_idx)),
            list(reversed(outer_idx)),
            "fwd",
            tie_break,
        )
    ia = [math.atan2(y, x) % TAU for x, y in inner_pts]
    oa = [math.atan2(y, x) % TAU for x, y in outer_pts]
    n, m = len(ia), len(oa)
    start_i = min(range(n), key=lambda k: ia[k])
    base = ia[start_i]
    start_j = min(range(m), key=lambda k: ((oa[k] - base) % TAU, k))

    def ang_i(s):
        return ia[(start_i + s) % n] + TAU * ((start_i + s) // n)

    def ang_o(s):
        return base + ((oa[(start_j + s) % m] - base) % TAU) + TAU * ((start_j + s) // m)

    def gi(s):
        return inner_idx[(start_i + s) % n]

    def go(s):
        return outer_idx[(start_j + s) % m]

    tris = []
    i = j = 0
    while i < n or j < m:
        can_i, can_j = i < n, j < m
        if can_i and can_j:
            nai, naj = ang_i(i + 1), ang_o(j + 1)
            if abs(nai - naj) < 1e-9:
                adv_inner = tie_break == "inner"
            else:
                adv_inner = nai < naj
        else:
            adv_inner = can_i
        if adv_inner:
            tris.append((gi(i), gi(i + 1), go(j)))
            i += 1
        else:
            tris.append((gi(i), go(j), go(j + 1)))
            j += 1
    return tris


def edge_margin(field, p, q, samples=16):
    """Smallest sampled angle (degrees) between the segment and the flow."""
    ed = math.atan2(q[1] - p[1], q[0] - p[0])
    worst = 180.0
    for s in range(samples + 1):
        t = s / samples
        x, y = p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])
        fx, fy = field.eval_float(x, y)
        fa = math.atan2(fy, fx)
        d = abs((fa - ed + math.pi / 2) % math.pi - math.pi / 2)
        worst = min(worst, math.degrees(d))
    return worst


def band_margin(field, verts, band_tris):
    worst = 180.0
    seen = set()
    for a, b, c in band_tris:
        for u, v in ((a, b), (a, c), (b, c)):
            e = (min(u, v), max(u, v))
            if e in seen:
                continue
            seen.add(e)
            worst = min(worst, edge_margin(field, verts[e[0]], verts[e[1]]))
    return worst


def build_ring_mesh(field, rings, cap_core=True):
    verts = []
    idxs = []
    for pts in rings:
        idx = []
        for p in pts:
            idx.append(len(verts))
            verts.append(p)
        idxs.append(idx)
    tris = []
    if cap_core:
        if len(idxs[0]) != 3:
            raise ValueError("innermost ring must be a triangle to cap")
        tris.append(tuple(idxs[0]))
    for k in range(len(rings) - 1):
        best = None
        for lean in ("fwd", "bwd"):
            for tie in ("inner", "outer"):
                cand = zipper(rings[k], rings[k + 1], idxs[k], idxs[k + 1], lean, tie)
                margin = band_margin(field, verts, cand)
                if best is None or margin > best[0]:
                    best = (margin, cand, lean, tie)
        print(f"  band {k}: lean {best[2]}/{best[3]}, sampled margin {best[0]:.1f} deg")
        tris.extend(best[1])
    return TriMesh(verts, tris)


def chord_cross_value(field, a, b, target, samples=12):
    """Worst signed normalized crossing margin of one chord.

    Positive means the flow crosses everywhere in the target radial
    direction (+1 outward, -1 inward) with that relative margin.
    """
    dx, dy = b[0] - a[0], b[1] - a[1]
    nx, ny = dy, -dx  # outward normal of a ccw ring chord
    nn = math.hypot(nx, ny)
    worst = math.inf
    for s in range(samples + 1):
        t = s / samples
        x, y = a[0] + t * dx, a[1] + t * dy
        fx, fy = field.eval_float(x, y)
        fn = math.hypot(fx, fy)
        if fn == 0.0:
            return -math.inf
        worst = min(worst, target * (nx * fx + ny * fy) / (nn * fn))
    return worst


def flow_slope(field, r, theta):
    """dr/dtheta of the flow at polar position (r, theta)."""
    x, y = r * math.cos(theta), r * math.sin(theta)
    fx, fy = field.eval_float(x, y)
    rdot = (x * fx + y * fy) / r
    thdot = (x * fy - y * fx) / (r * r)
    return rdot / thdot


def closed_flow_ring(field, phi0, target, m, bracket, steps=None):
    """A closed polar curve the clockwise flow crosses at a uniform angle.

    Integrates dr/ds = -G - target*phi0*(r^2+G^2)/r over one clockwise turn,
    where G is the flow's radius-per-angle slope; the drain term keeps the
    angle between curve and flow near phi0 radians even where |G| is large.
    The curve is closed by bisection on the initial radius inside `bracket`
    and sampled at m points equidistributed by arc length.  target +1 gives
    a ring crossed strictly outward, -1 strictly inward.
    """
    if steps is None:
        steps = m * 48
    ds = TAU / steps

    def rhs(r, s):
        g = -flow_slope(field, r, -s)
        return g - target * phi0 * (r * r + g * g) / r

    def rk_step(r, s):
        k1 = rhs(r, s)
        k2 = rhs(r + 0.5 * ds * k1, s + 0.5 * ds)
        k3 = rhs(r + 0.5 * ds * k2, s + 0.5 * ds)
        k4 = rhs(r + ds * k3, s + ds)
        return r + ds * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0

    def turn(r0):
        r = r0
        for k in range(steps):
            r = rk_step(r, k * ds)
            if not (0.05 < r < 6.0):
                return None
        return r

    def gap(r0):
        r1 = turn(r0)
        return None if r1 is None else r1 - r0

    grid = [bracket[0] + (bracket[1] - bracket[0]) * k / 24 for k in range(25)]
    vals = [(r0, gap(r0)) for r0 in grid]
    lo = glo = hi = None
    for (r0, g0), (r1, g1) in zip(vals, vals[1:]):
        if g0 is not None and g1 is not None and (g0 > 0) != (g1 > 0):
            lo, hi, glo = r0, r1, g0
            break
    if lo is None:
        raise ValueError(f"no closed ring in bracket {bracket} for phi0={phi0}")
    for _ in range(52):
        mid = 0.5 * (lo + hi)
        g = gap(mid)
        if g is None:
            raise ValueError("ring integration escaped")
        if (g > 0) == (glo > 0):
            lo = mid
        else:
            hi = mid
    r0 = 0.5 * (lo + hi)

    # dense trace, then equidistribute m vertices by arc length
    rs = [r0]
    r = r0
    for k in range(steps):
        r = rk_step(r, k * ds)
        rs.append(r)
    arcs = [0.0]
    for k in range(steps):
        dr = rs[k + 1] - rs[k]
        arcs.append(arcs[-1] + math.hypot(dr, rs[k] * ds))
    total = arcs[-1]
    picks = []
    j = 0
    for i in range(m):
        want = total * i / m
        while arcs[j] < want:
            j += 1
        picks.append(j)
    picks = sorted(set(picks))
    return rs, ds, picks


def trace_point(rs, ds, j):
    th = (-j * ds) % TAU
    return (rs[j] * math.cos(th), rs[j] * math.sin(th))


def refine_ring(field, rs, ds, picks, target, thresh, max_inserts=240):
    """Insert trace midpoints into chords whose crossing margin is weak."""
    steps = len(rs) - 1
    picks = sorted(set(picks))

    def chord_val(j0, j1):
        return chord_cross_value(field, trace_point(rs, ds, j0), trace_point(rs, ds, j1), target)

    inserts = 0
    while inserts < max_inserts:
        worst = None
        for a, b in zip(picks, picks[1:] + [picks[0] + steps]):
            v = chord_val(a, b % steps if b >= steps else b)
            if worst is None or v < worst[0]:
                worst = (v, a, b)
        if worst[0] >= thresh:
            break
        _, a, b = worst
        mid = (a + b) // 2
        midm = mid % steps
        if midm in picks or mid == a or mid == b:
            break
        picks = sorted(set(picks + [midm]))
        inserts += 1
    pts = [trace_point(rs, ds, j) for j in picks]
    pts.sort(key=lambda p: math.atan2(p[1], p[0]) % TAU)
    return pts


def summarize(mesh, field, name, depth=8):
    rep = validate_mesh(mesh, field, depth=depth)
    nbad = len(rep.undetermined)
    print(f"{name}: {len(mesh.triangles)} triangles, {len(mesh.edges())} edges; "
          f"undetermined: {nbad}")
    if nbad:
        print("  e.g.", rep.undetermined[:16])
        return None
    mvf, rep = build_mvf(mesh, field, report=rep)
    cx = mvf.cx
    unverified = [t for t, v in rep.triangle_verified.items() if not v]
    print(f"  triangles failing equilibrium exclusion: {len(unverified)} {unverified[:4]}")
    found, md = find_invariant_sets(cx, mvf, exclude_cells=frozenset(rep.outflow))
    print(f"  morse sets: {len(md.nodes)}, nontrivial: {len(found)}")
    for i, node in enumerate(found):
        tops = sorted(node.cells & cx.toplexes())
        print(f"  invariant set {i}: {len(node.cells)} cells, "
              f"{len(tops)} toplexes, index {node.index}")
    return cx, mvf, rep, found


def gen_circles(outdir):
    print("circles system")
    field = parse_vector_field(CIRCLES_FIELD)
    off = math.pi / 6
    spec = [
        (0.25, 3, math.pi / 2),
        (0.40, 6, off),
        (0.55, 12, off),
        (0.70, 24, off),
        (1.30, 24, off),
        (1.60, 24, off),
        (1.90, 72, off),
        (2.15, 72, off),
        (2.40, 72, off),
        (2.65, 72, off),
    ]
    rings = [circle_ring(lambda th, r=r: r, m, o) for r, m, o in spec]
    mesh = build_ring_mesh(field, rings, cap_core=True)
    out = summarize(mesh, field, "circles")
    if out is None:
        return False
    (outdir / "circles.mesh.json").write_text(json.dumps(mesh.to_json()))
    (outdir / "circles.field.txt").write_text(CIRCLES_FIELD)
    return True


def vdp_cycle_radius(nbins=2880):
    """Radius-by-angle table of the van der Pol limit cycle (RK4, non-rigorous)."""

    def f(x, y):
        return y, y * (1 - x * x) - x

    dt = 5e-4

    def step(x, y):
        k1 = f(x, y)
        k2 = f(x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1])
        k3 = f(x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1])
        k4 = f(x + dt * k3[0], y + dt * k3[1])
        return (
            x + dt * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0,
            y + dt * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0,
        )

    x, y = 2.0, 0.0
    for _ in range(int(60.0 / dt)):
        x, y = step(x, y)
    sums = [0.0] * nbins
    counts = [0] * nbins
    for _ in range(int(8.0 / dt)):
        x, y = step(x, y)
        th = math.atan2(y, x) % TAU
        b = int(th / TAU * nbins) % nbins
        sums[b] += math.hypot(x, y)
        counts[b] += 1
    table = [0.0] * nbins
    for i in range(nbins):
        if counts[i]:
            table[i] = sums[i] / counts[i]
    for i in range(nbins):
        if table[i] == 0.0:
            j = 1
            while table[(i + j) % nbins] == 0.0 and table[(i - j) % nbins] == 0.0:
                j += 1
            vals = [v for v in (table[(i + j) % nbins], table[(i - j) % nbins]) if v]
            table[i] = sum(vals) / len(vals)
    for _ in range(4):
        table = [
            0.25 * table[i - 1] + 0.5 * table[i] + 0.25 * table[(i + 1) % nbins]
            for i in range(nbins)
        ]
    return table


def gen_vdp(outdir):
    print("van der Pol system")
    field = parse_vector_field(VDP_FIELD)
    m = 48
    # (phi0 angle margin, crossing target, bracket for the radius at angle 0)
    spec = [
        (0.14, +1, (0.9, 1.9)),
        (0.08, +1, (1.2, 1.95)),
        (0.04, +1, (1.5, 2.01)),
        (0.04, -1, (2.02, 2.8)),
        (0.10, -1, (2.05, 3.2)),
    ]
    rings = []
    for phi0, target, bracket in spec:
        rs, ds, picks = closed_flow_ring(field, phi0, target, m, bracket)
        pts = refine_ring(field, rs, ds, picks, target, thresh=0.30 * phi0)
        n = len(pts)
        worst = min(
            chord_cross_value(field, pts[k], pts[(k + 1) % n], target)
            for k in range(n)
        )
        r0 = math.hypot(*max(pts, key=lambda p: p[0]))
        print(f"  ring phi0={phi0} target={target:+d}: r(0)~{r0:.3f}, "
              f"{n} verts, worst chord margin {worst:.4f}")
        rings.append(pts)
    mesh = build_ring_mesh(field, rings, cap_core=False)
    out = summarize(mesh, field, "vdp")
    if out is None:
        return False
    (outdir / "vdp.mesh.json").write_text(json.dumps(mesh.to_json()))
    (outdir / "vdp.field.txt").write_text(VDP_FIELD)
    return True


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "orbicert" / "data"
    )
    outdir.mkdir(parents=True, exist_ok=True)
    ok1 = gen_circles(outdir)
    ok2 = gen_vdp(outdir)
    print("circles:", "OK" if ok1 else "FAILED", " vdp:", "OK" if ok2 else "FAILED")
    sys.exit(0 if (ok1 and ok2) else 1)


if __name__ == "__main__":
    main()

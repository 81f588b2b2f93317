"""Rigorous transversality checks and the induced multivector field.

Each edge is tested for a strict flow crossing by bounding the normal
component of the field along the exact segment (interval-coefficient
polynomial in the segment parameter, bisected on demand).  Each triangle is
tested for the absence of equilibria by excluding zero from one component of
the field over its bounding box.  Each vertex is resolved by locating the
interval cone of the field value strictly inside one incident angular
sector.  A verdict is only "determined" when the interval test is strict.

The determined edge and vertex verdicts assemble into the induced
multivector field: one multivector per triangle collecting the cells that
immediately enter it, and a singleton per outflow cell.  Undetermined
triangles do not block the construction; they only block certification of
invariant sets containing them.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

from ..mvf import InternalInvariantError, MultivectorField
from .interval import Interval
from .mesh import TriMesh, edge_key
from .vfield import eval_interval, eval_poly1, poly_add, poly_bound, poly_mul


class UndeterminedCellsError(ValueError):
    def __init__(self, cells):
        self.cells = sorted(cells)
        preview = ", ".join(self.cells[:8])
        more = "" if len(self.cells) <= 8 else f" (+{len(self.cells) - 8} more)"
        super().__init__(f"undetermined cells: {preview}{more}")


@dataclass
class EdgeVerdict:
    kind: str              # "enters" | "outflow" | "undetermined"
    triangle: str = None   # entered triangle id for "enters"
    sign: int = 0          # sign of the left-normal component

    def to_json(self):
        return {"kind": self.kind, "triangle": self.triangle, "sign": self.sign}


@dataclass
class VertexVerdict:
    kind: str              # "enters" | "outflow" | "undetermined"
    triangle: str = None

    def to_json(self):
        return {"kind": self.kind, "triangle": self.triangle}


@dataclass
class TriangleVerdict:
    verified: bool
    witnesses: list = dc_field(default_factory=list)  # [box, component, sign]
    offending: list = None

    def to_json(self):
        return {
            "verified": self.verified,
            "witnesses": self.witnesses,
            "offending": self.offending,
        }


@dataclass
class TransversalityReport:
    field_text: str
    edge_verdicts: dict
    vertex_verdicts: dict
    triangle_verdicts: dict
    ift: dict              # cell id -> entered toplex id (toplexes included)
    outflow: list          # cell ids leaving the mesh
    undetermined: list     # edge/vertex cell ids without a strict verdict

    @property
    def determined(self):
        return not self.undetermined

    @property
    def triangle_verified(self):
        return {t: v.verified for t, v in self.triangle_verdicts.items()}

    def to_json(self):
        return {
            "field": self.field_text,
            "determined": self.determined,
            "edges": {k: v.to_json() for k, v in sorted(self.edge_verdicts.items())},
            "vertices": {k: v.to_json() for k, v in sorted(self.vertex_verdicts.items())},
            "triangles": {k: v.to_json() for k, v in sorted(self.triangle_verdicts.items())},
            "ift": dict(sorted(self.ift.items())),
            "outflow": sorted(self.outflow),
            "undetermined": sorted(self.undetermined),
        }


# -- edges ------------------------------------------------------------------


def _segment_polys(mesh, e):
    (ax, ay) = mesh.vertices[e[0]]
    (bx, by) = mesh.vertices[e[1]]
    px = [Interval(ax), Interval(bx) - Interval(ax)]
    py = [Interval(ay), Interval(by) - Interval(ay)]
    # left normal of the directed segment a -> b
    nx = Interval(ay) - Interval(by)
    ny = Interval(bx) - Interval(ax)
    return px, py, nx, ny


def _poly_sign(poly, depth, eps):
    """Strict sign of an interval polynomial over [0,1], bisecting on demand."""
    stack = [(Interval(0.0, 1.0), depth)]
    sign = 0
    while stack:
        t, d = stack.pop()
        s = poly_bound(poly, t).strict_sign(eps)
        if s == 0:
            if d <= 0:
                return 0
            halves = t.split()
            if len(halves) == 1:
                return 0
            stack.extend((h, d - 1) for h in halves)
            continue
        if sign == 0:
            sign = s
        elif sign != s:
            return 0
    return sign


def check_edge(mesh, field, e, depth=8, eps=0.0):
    """Crossing verdict for one edge (undirected vertex pair)."""
    e = edge_key(*e)
    px, py, nx, ny = _segment_polys(mesh, e)
    gx = eval_poly1(field.fx, px, py)
    gy = eval_poly1(field.fy, px, py)
    poly = poly_add(poly_mul([nx], gx), poly_mul([ny], gy))
    s = _poly_sign(poly, depth, eps)
    if s == 0:
        return EdgeVerdict("undetermined")
    tris = mesh.edge_tris[e]
    for ti in tris:
        if mesh.triangle_side(e, ti) == s:
            return EdgeVerdict("enters", mesh.triangle_id(ti), s)
    # boundary edge crossed away from its only triangle
    return EdgeVerdict("outflow", None, s)


# -- triangles ----------------------------------------------------------------


def _box_misses_triangle(box, pts):
    """Exact separating-axis test; True only when box and triangle are disjoint."""
    from fractions import Fraction

    xlo, xhi, ylo, yhi = (Fraction(v) for v in box)
    tri = [(Fraction(x), Fraction(y)) for x, y in pts]
    corners = [(xlo, ylo), (xhi, ylo), (xlo, yhi), (xhi, yhi)]
    axes = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    for k in range(3):
        (x1, y1), (x2, y2) = tri[k], tri[(k + 1) % 3]
        axes.append((y2 - y1, x1 - x2))
    for ax, ay in axes:
        t_proj = [ax * x + ay * y for x, y in tri]
        b_proj = [ax * x + ay * y for x, y in corners]
        if max(t_proj) < min(b_proj) or max(b_proj) < min(t_proj):
            return True
    return False


def check_triangle(mesh, field, ti, depth=8, eps=0.0):
    """Equilibrium exclusion of a triangle.

    Works on sub-boxes of the bounding box; boxes that provably miss the
    triangle are discarded, the rest must exclude zero from one component of
    the field.
    """
    pts = [mesh.vertices[v] for v in mesh.triangles[ti]]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    depth = min(depth, 5)
    witnesses = []
    stack = [(min(xs), max(xs), min(ys), max(ys), depth)]
    while stack:
        xlo, xhi, ylo, yhi, d = stack.pop()
        bx, by = Interval(xlo, xhi), Interval(ylo, yhi)
        done = False
        for comp, ast in (("x", field.fx), ("y", field.fy)):
            s = eval_interval(ast, bx, by).strict_sign(eps)
            if s != 0:
                witnesses.append([[xlo, xhi, ylo, yhi], comp, s])
                done = True
                break
        if done:
            continue
        if d <= 0 or not (xlo < 0.5 * (xlo + xhi) < xhi and ylo < 0.5 * (ylo + yhi) < yhi):
            if _box_misses_triangle((xlo, xhi, ylo, yhi), pts):
                continue
            return TriangleVerdict(False, witnesses, [xlo, xhi, ylo, yhi])
        if d <= depth - 2 and _box_misses_triangle((xlo, xhi, ylo, yhi), pts):
            continue
        xm, ym = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)
        stack.extend(
            (
                (xlo, xm, ylo, ym, d - 1),
                (xm, xhi, ylo, ym, d - 1),
                (xlo, xm, ym, yhi, d - 1),
                (xm, xhi, ym, yhi, d - 1),
            )
        )
    return TriangleVerdict(True, witnesses)


# -- vertices -------------------------------------------------------------------


def _icross(ax, ay, bx, by):
    return ax * by - ay * bx


def vertex_ift(mesh, field, v, eps=0.0):
    """Locate the field cone at a vertex strictly inside one incident sector."""
    vx, vy = mesh.vertices[v]
    gx, gy = field.eval_interval(Interval(vx), Interval(vy))
    if gx.contains(0.0) and gy.contains(0.0):
        return VertexVerdict("undetermined")
    inside = []
    all_outside = True
    for ti in mesh.vertex_tris.get(v, ()):
        p, q = [w for w in mesh.triangles[ti] if w != v]
        if mesh.orient(v, p, q) < 0:
            p, q = q, p
        d1 = (
            Interval(mesh.vertices[p][0]) - Interval(vx),
            Interval(mesh.vertices[p][1]) - Interval(vy),
        )
        d2 = (
            Interval(mesh.vertices[q][0]) - Interval(vx),
            Interval(mesh.vertices[q][1]) - Interval(vy),
        )
        c1 = _icross(d1[0], d1[1], gx, gy).strict_sign(eps)
        c2 = _icross(gx, gy, d2[0], d2[1]).strict_sign(eps)
        if c1 > 0 and c2 > 0:
            inside.append(ti)
        elif not (c1 < 0 or c2 < 0):
            all_outside = False
    if len(inside) == 1:
        return VertexVerdict("enters", mesh.triangle_id(inside[0]))
    if not inside and all_outside and mesh.is_boundary_vertex(v):
        return VertexVerdict("outflow")
    return VertexVerdict("undetermined")


# -- whole-mesh validation --------------------------------------------------------


def _edge_chunk(args):
    mesh, field, edges, depth, eps = args
    return [(e, check_edge(mesh, field, e, depth, eps)) for e in edges]


def validate_mesh(mesh, field, depth=8, eps=0.0, jobs=1):
    """Run all per-cell checks and assemble the transversality report."""
    edges = mesh.edges()
    if jobs > 1 and len(edges) > 4 * jobs:
        chunks = [edges[i::jobs] for i in range(jobs)]
        results = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(
                _edge_chunk, [(mesh, field, c, depth, eps) for c in chunks]
            ):
                results.extend(part)
        results.sort(key=lambda kv: kv[0])
        edge_verdicts = {mesh.edge_id(e): v for e, v in results}
    else:
        edge_verdicts = {
            mesh.edge_id(e): check_edge(mesh, field, e, depth, eps) for e in edges
        }
    vertex_verdicts = {
        mesh.vertex_id(v): vertex_ift(mesh, field, v, eps)
        for v in range(len(mesh.vertices))
    }
    triangle_verdicts = {
        mesh.triangle_id(ti): check_triangle(mesh, field, ti, depth, eps)
        for ti in range(len(mesh.triangles))
    }
    ift = {}
    outflow = []
    undetermined = []
    for ti in range(len(mesh.triangles)):
        tid = mesh.triangle_id(ti)
        ift[tid] = tid
    for cid, verdict in list(edge_verdicts.items()) + list(vertex_verdicts.items()):
        if verdict.kind == "enters":
            ift[cid] = verdict.triangle
        elif verdict.kind == "outflow":
            outflow.append(cid)
        else:
            undetermined.append(cid)
    return TransversalityReport(
        field_text=field.text,
        edge_verdicts=edge_verdicts,
        vertex_verdicts=vertex_verdicts,
        triangle_verdicts=triangle_verdicts,
        ift=ift,
        outflow=outflow,
        undetermined=undetermined,
    )


def build_mvf(mesh, field, depth=8, eps=0.0, jobs=1, report=None):
    """Induced multivector field of a fully determined mesh.

    Raises UndeterminedCellsError when any edge or vertex lacks a strict
    verdict.  Returns (MultivectorField, TransversalityReport); the field is
    defined over `mesh.complex()`.
    """
    if report is None:
        report = validate_mesh(mesh, field, depth, eps, jobs)
    if not report.determined:
        raise UndeterminedCellsError(report.undetermined)
    cx = mesh.complex()
    groups = {}
    for cid, target in report.ift.items():
        groups.setdefault(target, []).append(cid)
    vectors = [groups[t] for t in sorted(groups)]
    vectors += [[c] for c in sorted(report.outflow)]
    mvf = MultivectorField(cx, vectors)
    issues = mvf.validate()
    if issues:
        raise InternalInvariantError(
            "induced field is not a valid multivector field: " + "; ".join(issues)
        )
    for target, members in groups.items():
        if cx.poset.closure(members) != cx.poset.closure([target]):
            raise InternalInvariantError(
                f"multivector of {target} does not close onto its toplex"
            )
    return mvf, report


def detect_circular_intersection(cx, report, sigma, tau):
    """True when two toplexes exchange cells in both directions."""
    if sigma == tau:
        raise ValueError("need two distinct toplexes")
    shared = cx.poset.closure([sigma]) & cx.poset.closure([tau])
    if not shared:
        raise ValueError("toplexes do not intersect")
    into_sigma = any(report.ift.get(c) == sigma for c in shared)
    into_tau = any(report.ift.get(c) == tau for c in shared)
    return into_sigma and into_tau


def perturb_mesh(mesh, field, seed=0, rounds=8, depth=8, eps=0.0, scale=0.15):
    """Best-effort jitter of vertices on undetermined cells.

    Not rigorous by design; callers re-validate the returned mesh.  The
    original mesh is returned when it is already fully determined or no
    jitter improves it.
    """
    report = validate_mesh(mesh, field, depth, eps)
    best = (len(report.undetermined), mesh)
    if rounds <= 0 or not report.undetermined:
        return mesh
    rng = random.Random(seed)
    current = mesh
    current_und = report.undetermined
    for _ in range(rounds):
        movers = set()
        for cid in current_und:
            movers.update(int(p) for p in cid.split("-"))
        verts = [list(p) for p in current.vertices]
        for vi in movers:
            local = min(
                _dist(current.vertices[vi], current.vertices[w])
                for w in current._vertex_neighbors(vi)
            )
            verts[vi][0] += rng.uniform(-scale, scale) * local
            verts[vi][1] += rng.uniform(-scale, scale) * local
        try:
            cand = TriMesh(verts, current.triangles)
        except Exception:
            continue
        rep = validate_mesh(cand, field, depth, eps)
        if len(rep.undetermined) < best[0]:
            best = (len(rep.undetermined), cand)
            current, current_und = cand, rep.undetermined
            if not current_und:
                break
    return best[1]


def _dist(p, q):
    return ((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2) ** 0.5

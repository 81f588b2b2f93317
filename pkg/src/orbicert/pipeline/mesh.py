"""Planar triangle meshes with edge adjacency."""

from __future__ import annotations

import json
from fractions import Fraction

from ..cellcomplex import CellComplex


class MeshError(ValueError):
    pass


def edge_key(a, b):
    return (a, b) if a < b else (b, a)


class TriMesh:
    """Vertices, triangles, and the derived edge-to-triangle adjacency."""

    def __init__(self, vertices, triangles):
        self.vertices = [(float(x), float(y)) for x, y in vertices]
        self.triangles = [tuple(sorted(map(int, t))) for t in triangles]
        seen = {}
        for i, p in enumerate(self.vertices):
            if p in seen:
                raise MeshError(f"duplicate vertex {i} == {seen[p]} at {p}")
            seen[p] = i
        if len(set(self.triangles)) != len(self.triangles):
            raise MeshError("duplicate triangle")
        self.edge_tris = {}
        for ti, (a, b, c) in enumerate(self.triangles):
            if len({a, b, c}) != 3:
                raise MeshError(f"degenerate triangle {ti}")
            for u, v in ((a, b), (a, c), (b, c)):
                if not (0 <= u < len(self.vertices)):
                    raise MeshError(f"triangle {ti} uses unknown vertex {u}")
                self.edge_tris.setdefault(edge_key(u, v), []).append(ti)
        for e, ts in self.edge_tris.items():
            if len(ts) > 2:
                raise MeshError(f"edge {e} is shared by {len(ts)} triangles")
            pa, pb = self.vertices[e[0]], self.vertices[e[1]]
            if pa == pb:
                raise MeshError(f"zero-length edge {e}")
        self.vertex_tris = {}
        for ti, tri in enumerate(self.triangles):
            for v in tri:
                self.vertex_tris.setdefault(v, []).append(ti)

    # -- cell identifiers shared with the combinatorial side ---------------

    def vertex_id(self, v):
        return str(v)

    def edge_id(self, e):
        return f"{e[0]}-{e[1]}"

    def triangle_id(self, ti):
        a, b, c = self.triangles[ti]
        return f"{a}-{b}-{c}"

    def edges(self):
        return sorted(self.edge_tris)

    def boundary_edges(self):
        return sorted(e for e, ts in self.edge_tris.items() if len(ts) == 1)

    def is_boundary_vertex(self, v):
        for e in ((min(v, w), max(v, w)) for w in self._vertex_neighbors(v)):
            if len(self.edge_tris[e]) == 1:
                return True
        return False

    def _vertex_neighbors(self, v):
        out = set()
        for ti in self.vertex_tris.get(v, ()):
            for w in self.triangles[ti]:
                if w != v:
                    out.add(w)
        return out

    def complex(self):
        """The simplicial complex of the mesh (vertex indices as labels)."""
        return CellComplex.from_simplices(self.triangles)

    # -- geometry helpers ---------------------------------------------------

    def orient(self, a, b, c):
        """Exact orientation sign of the vertex triple (ccw positive)."""
        ax, ay = (Fraction(t) for t in self.vertices[a])
        bx, by = (Fraction(t) for t in self.vertices[b])
        cx, cy = (Fraction(t) for t in self.vertices[c])
        det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        return (det > 0) - (det < 0)

    def triangle_side(self, e, ti):
        """Exact side (+1/-1) of triangle ti relative to the directed edge e."""
        a, b = e
        other = next(v for v in self.triangles[ti] if v not in e)
        s = self.orient(a, b, other)
        if s == 0:
            raise MeshError(f"degenerate triangle {ti} against edge {e}")
        return s

    # -- serialization --------------------------------------------------------

    def to_json(self):
        return {
            "vertices": [[x, y] for x, y in self.vertices],
            "triangles": [list(t) for t in self.triangles],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["vertices"], obj["triangles"])

"""Cellular decompositions as graded posets.

Two kinds are supported: simplicial complexes, whose cells carry sorted
vertex tuples and whose incidence signs come from the alternating-sum
orientation, and abstract regular CW complexes, whose cells carry
user-supplied signed facet maps.  Cell identifiers are strings: a simplicial
cell over vertices 3, 7, 12 is called "3-7-12".

The module is purely combinatorial; geometry lives in `orbicert.pipeline`.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations

from .fintop import FinitePoset
from .homology import ChainComplex


class ComplexError(ValueError):
    pass


def simplex_id(verts):
    return "-".join(str(v) for v in sorted(verts))


def simplex_verts(cell_id):
    return tuple(int(v) for v in cell_id.split("-"))


class CellComplex:
    """A finite cell complex: graded face poset plus boundary incidences."""

    def __init__(self, kind, dims, covers, verts=None, incidence=None):
        if kind not in ("simplicial", "cw"):
            raise ComplexError(f"unknown complex kind {kind!r}")
        self.kind = kind
        self.dims = dict(dims)
        self.poset = FinitePoset(self.dims.keys(), covers)
        self.verts = dict(verts) if verts else None
        self.incidence = incidence
        self._toplexes = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_simplices(cls, simplices):
        """Build a simplicial complex from vertex lists, closing downward."""
        cells = {}
        for s in simplices:
            vs = tuple(sorted(set(s)))
            if not vs:
                raise ComplexError("empty simplex")
            if len(vs) != len(set(s)):
                raise ComplexError(f"repeated vertex in simplex {s!r}")
            for k in range(1, len(vs) + 1):
                for face in combinations(vs, k):
                    cells[simplex_id(face)] = face
        dims = {cid: len(vs) - 1 for cid, vs in cells.items()}
        covers = []
        for cid, vs in cells.items():
            if len(vs) > 1:
                for face in combinations(vs, len(vs) - 1):
                    covers.append((simplex_id(face), cid))
        return cls("simplicial", dims, covers, verts=cells)

    @classmethod
    def from_cw(cls, cells):
        """Build a CW complex from [{'id', 'dim', 'facets': [{'id','sign'}]}]."""
        dims = {}
        incidence = {}
        covers = []
        for c in cells:
            cid = str(c["id"])
            if cid in dims:
                raise ComplexError(f"duplicate cell id {cid!r}")
            dims[cid] = int(c["dim"])
            row = {}
            for f in c.get("facets", ()):
                fid = str(f["id"])
                row[fid] = int(f["sign"])
                covers.append((fid, cid))
            incidence[cid] = row
        for cid, row in incidence.items():
            for fid in row:
                if fid not in dims:
                    raise ComplexError(f"facet {fid!r} of {cid!r} is missing")
        cx = cls("cw", dims, covers, incidence=incidence)
        bad = cx._check_dd_zero()
        if bad is not None:
            raise ComplexError(f"boundary of boundary is nonzero at cell {bad!r}")
        return cx

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj.get("kind")
        if kind == "simplicial":
            return cls.from_simplices(obj["cells"])
        if kind == "cw":
            return cls.from_cw(obj["cells"])
        raise ComplexError(f"unknown complex kind {kind!r}")

    def to_json(self):
        if self.kind == "simplicial":
            tops = sorted(self.toplexes())
            nverts = 1 + max(v for c in tops for v in simplex_verts(c))
            return {
                "kind": "simplicial",
                "vertices": nverts,
                "cells": [list(simplex_verts(c)) for c in tops],
            }
        cells = []
        for cid in sorted(self.dims):
            facets = [
                {"id": f, "sign": s}
                for f, s in sorted(self.incidence[cid].items())
            ]
            cells.append({"id": cid, "dim": self.dims[cid], "facets": facets})
        return {"kind": "cw", "cells": cells}

    # -- queries ---------------------------------------------------------

    def __len__(self):
        return len(self.dims)

    def __contains__(self, cid):
        return cid in self.dims

    @property
    def cells(self):
        return frozenset(self.dims)

    def dim(self, cid=None):
        if cid is not None:
            return self.dims[cid]
        return max(self.dims.values(), default=-1)

    def toplexes(self):
        """All cells that are not proper faces of another cell."""
        if self._toplexes is None:
            self._toplexes = frozenset(
                c for c in self.dims if self.poset.opn([c]) == {c}
            )
        return self._toplexes

    def frame(self):
        """All non-toplex cells."""
        return self.cells - self.toplexes()

    def star(self, cid):
        return self.poset.opn([cid])

    def skeleton(self, k):
        """Sub-complex of all cells of dimension at most k."""
        keep = {c for c, d in self.dims.items() if d <= k}
        dims = {c: self.dims[c] for c in keep}
        if self.kind == "simplicial":
            verts = {c: self.verts[c] for c in keep}
            covers = [
                (simplex_id(f), c)
                for c, vs in verts.items()
                if len(vs) > 1
                for f in combinations(vs, len(vs) - 1)
            ]
            return CellComplex("simplicial", dims, covers, verts=verts)
        inc = {c: {f: s for f, s in self.incidence[c].items()} for c in keep}
        covers = [(f, c) for c, row in inc.items() for f in row]
        return CellComplex("cw", dims, covers, incidence=inc)

    def facets(self, cid):
        """Signed facet map of a cell, as {facet_id: sign}."""
        if self.kind == "simplicial":
            vs = self.verts[cid]
            if len(vs) == 1:
                return {}
            out = {}
            for i in range(len(vs)):
                face = vs[:i] + vs[i + 1:]
                out[simplex_id(face)] = 1 if i % 2 == 0 else -1
            return out
        if self.incidence is None:
            raise ComplexError("CW complex without incidence data")
        return self.incidence[cid]

    # -- chain complexes ---------------------------------------------------

    def chain_complex(self, cells_a, cells_b=()):
        """Relative cellular chain complex of the closed pair (A, B).

        Both sets must be downward closed and B contained in A; the relative
        complex is spanned by the cells of A not in B, boundary entries into
        B dropped.
        """
        a = frozenset(cells_a)
        b = frozenset(cells_b)
        if not b <= a:
            raise ComplexError("B must be a subset of A")
        for name, s in (("A", a), ("B", b)):
            if not self.poset.is_closed(s):
                raise ComplexError(f"{name} is not closed")
        rel = a - b
        by_deg = {}
        for c in rel:
            by_deg.setdefault(self.dims[c], []).append(c)
        top = max(by_deg, default=-1)
        labels = [sorted(by_deg.get(k, [])) for k in range(top + 1)]
        index = [
            {c: i for i, c in enumerate(lv)} for lv in labels
        ]
        mats = []
        for k in range(1, top + 1):
            cols = []
            for c in labels[k]:
                col = {}
                for f, s in self.facets(c).items():
                    if f in index[k - 1]:
                        col[index[k - 1][f]] = Fraction(s)
                cols.append(col)
            mats.append((len(labels[k - 1]), cols))
        return ChainComplex(
            ranks=[len(lv) for lv in labels],
            boundaries=mats,
            labels=labels,
        )

    def _check_dd_zero(self):
        for cid in self.dims:
            if self.dims[cid] < 2:
                continue
            acc = {}
            for f, s in self.facets(cid).items():
                for g, t in self.facets(f).items():
                    acc[g] = acc.get(g, 0) + s * t
            if any(v != 0 for v in acc.values()):
                return cid
        return None

    # -- validation ---------------------------------------------------------

    def validate(self):
        """Structural report; empty list means valid."""
        issues = []
        for cid in self.dims:
            for f in self.facets(cid):
                if f not in self.dims:
                    issues.append(f"missing face: {f!r} of {cid!r}")
                elif self.dims[f] != self.dims[cid] - 1:
                    issues.append(
                        f"grading: facet {f!r} of {cid!r} has dimension "
                        f"{self.dims[f]}, expected {self.dims[cid] - 1}"
                    )
        for cid in self.dims:
            for other in self.poset.closure([cid]):
                if other != cid and self.dims[other] >= self.dims[cid]:
                    issues.append(
                        f"grading: {other!r} < {cid!r} but dimensions "
                        f"{self.dims[other]} >= {self.dims[cid]}"
                    )
        if self.kind == "simplicial":
            for cid, vs in self.verts.items():
                expect = {
                    simplex_id(f)
                    for k in range(1, len(vs) + 1)
                    for f in combinations(vs, k)
                }
                got = self.poset.closure([cid])
                if expect != got:
                    issues.append(
                        f"face lattice of {cid!r} is not the subset lattice"
                    )
        else:
            bad = self._check_dd_zero()
            if bad is not None:
                issues.append(f"boundary squared nonzero at {bad!r}")
        return issues

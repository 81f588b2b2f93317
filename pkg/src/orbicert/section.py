"""Combinatorial Poincare sections, Lyapunov values, levels and shifts.

Given an isolated invariant set A and a candidate section P, the derived
data are: the cut H (closure of A's part of P's mouth), the working region
R = cl A minus H, the relative section closure, a Lyapunov value per cell of
R (the worst fence distance to the section closure over all forward routes),
and a finite filtration of R whose successive differences, the shifts, wrap
around the invariant set like the segments of an annulus.  The toplexes of
the shifts, in reversed order, are the coarsening handed to the certifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fintop import _bits
from .mvf import DynGraph, InternalInvariantError


class SectionPreconditionError(ValueError):
    """The candidate P fails its preconditions (shape, compatibility)."""


class SectionRejected(Exception):
    """A structurally fine candidate violates one of the section conditions."""

    def __init__(self, condition, detail=""):
        self.condition = condition
        self.detail = detail
        super().__init__(f"section rejected at {condition}" + (f": {detail}" if detail else ""))


class CoarseningDegenerateError(ValueError):
    """Some shift contains no toplex, so no usable coarsening exists."""


@dataclass
class SectionData:
    cx: object
    mvf: object
    invariant_set: frozenset
    section: frozenset
    cut: frozenset              # H
    region: frozenset           # R
    section_closure: frozenset  # closure of P relative to R
    lyapunov_values: dict = None
    threshold: int = None       # min Lyapunov value over the re-entry cells
    levels: list = None
    shifts: list = None
    k_max: int = None

    def to_json(self):
        return {
            "invariant_set": sorted(self.invariant_set),
            "section": sorted(self.section),
            "cut": sorted(self.cut),
            "region": sorted(self.region),
            "section_closure": sorted(self.section_closure),
            "lyapunov": {c: v for c, v in sorted(self.lyapunov_values.items())}
            if self.lyapunov_values is not None
            else None,
            "threshold": self.threshold,
            "levels": [sorted(l) for l in self.levels] if self.levels else None,
            "shifts": [sorted(a) for a in self.shifts] if self.shifts else None,
            "k_max": self.k_max,
        }


def build_section(cx, mvf, invariant_set, section):
    """Validate a section candidate and derive its cut and region.

    The caller is responsible for `invariant_set` being isolated invariant;
    compatibility and local closedness are re-checked cheaply here.  Raises
    SectionPreconditionError for malformed candidates and SectionRejected
    (carrying the first violated condition) otherwise.
    """
    poset = cx.poset
    a = frozenset(invariant_set)
    p = frozenset(section)
    if not p:
        raise SectionPreconditionError("section is empty")
    if not p <= a:
        raise SectionPreconditionError("section is not contained in the invariant set")
    if not poset.is_locally_closed(p):
        raise SectionPreconditionError("section is not locally closed")
    if not mvf.is_compatible(p):
        raise SectionPreconditionError("section is not a union of multivectors")
    if not mvf.is_compatible(a) or not poset.is_locally_closed(a):
        raise SectionPreconditionError("invariant set is malformed")

    cl_a = poset.closure(a)
    mo_p = poset.mouth(p)
    cut = poset.closure(a & mo_p)
    region = cl_a - cut
    if not cut:
        raise SectionRejected("cut-empty", "closure(A & mouth P) is empty")
    if p & cut:
        raise SectionRejected("section-meets-cut")
    if not poset.is_connected(region):
        raise SectionRejected("region-disconnected")

    # every maximal essential route in cl A must reach the cut or leave A:
    # the sub-graph away from them must carry no essential component
    mo_a = cl_a - a
    core = cl_a - (cut | mo_a)
    if core:
        g = DynGraph(mvf, core)
        if any(g._essential):
            raise SectionRejected(
                "recurrence-escapes-cut",
                "an essential component avoids the cut",
            )

    pbar = poset.cl_rel(region, p)
    if poset.mask(cut) & poset.closure_mask(poset.mask(poset.bd_rel(region, pbar))):
        raise SectionRejected("cut-meets-section-boundary")
    return SectionData(cx, mvf, a, p, cut, region, pbar)


def lyapunov(sd):
    """Fill in the Lyapunov values and the re-entry threshold.

    L(tau) is the maximum, over routes of the induced map inside the region
    that start at tau, of the fence distance from the section closure; it is
    finite because cycles collapse in the condensation and the distance is
    bounded, and it never increases along an edge of the induced map.
    """
    cx, poset = sd.cx, sd.cx.poset
    d = poset.fence_distances_from(sd.region, sd.section_closure)
    missing = sd.region - d.keys()
    if missing:
        raise InternalInvariantError(
            "region is fence-connected yet some cells have no fence to the section"
        )
    g = DynGraph(sd.mvf, sd.region)
    scc_val = {}
    lv = {}
    # Tarjan emits components in reverse topological order: successors first
    for k, m in enumerate(g.sccs):
        best = 0
        for i in _bits(m):
            cell = poset._ids[i]
            best = max(best, d[cell])
            for j in _bits(g._succ[i]):
                t = g._scc_of[j]
                if t != k:
                    best = max(best, scc_val[t])
        scc_val[k] = best
        for i in _bits(m):
            lv[poset._ids[i]] = best
    sd.lyapunov_values = lv

    cl_a = poset.closure(sd.invariant_set)
    reentry = (poset.opn(sd.cut) & cl_a) - poset.closure(sd.section)
    if not reentry:
        raise SectionRejected("threshold-undefined", "no re-entry cells above the cut")
    sd.threshold = min(lv[c] for c in reentry)
    return lv


def shifts(sd):
    """Run the level recursion and cut the region into shifts.

    Levels grow from the section closure by taking all cells whose Lyapunov
    value is at most the worst value seen on the cells newly touching the
    previous level; once that worst value reaches the threshold the region
    itself closes the filtration.  Shift i is level i+1 minus the relative
    interior of level i.
    """
    if sd.lyapunov_values is None:
        lyapunov(sd)
    poset = sd.cx.poset
    lv = sd.lyapunov_values
    region = sd.region
    levels = [frozenset(), frozenset(sd.section_closure)]
    k_max = None
    while True:
        prev = levels[-1]
        if prev == region:
            raise InternalInvariantError(
                "level recursion filled the region without triggering the stop rule"
            )
        prev_mask = poset.mask(prev)
        fringe = [
            c
            for c in region - prev
            if poset.closure_mask(poset.mask([c])) & prev_mask
        ]
        if not fringe:
            raise InternalInvariantError("level recursion stalled on a fringe gap")
        n_k = max(lv[c] for c in fringe)
        if n_k >= sd.threshold:
            levels.append(frozenset(region))
            k_max = len(levels) - 1
            break
        levels.append(frozenset(c for c in region if lv[c] <= n_k))
    sd.levels = levels
    sd.k_max = k_max
    out = []
    for i in range(k_max):
        interior = poset.int_rel(region, levels[i])
        out.append(levels[i + 1] - interior)
    if any(not a for a in out):
        raise InternalInvariantError("empty shift in the filtration")
    sd.shifts = out
    return levels, out, k_max


def toplex_coarsening(sd):
    """Reversed-index toplex families of the shifts.

    Families must be pairwise disjoint and cover exactly the invariant set's
    toplexes; a shift without a toplex makes the coarsening unusable.
    """
    if sd.shifts is None:
        shifts(sd)
    tops = sd.cx.toplexes()
    fams = [frozenset(a & tops) for a in reversed(sd.shifts)]
    for i, f in enumerate(fams):
        if not f:
            raise CoarseningDegenerateError(f"shift family {i} contains no toplex")
    seen = set()
    for f in fams:
        if f & seen:
            raise InternalInvariantError("toplex families overlap")
        seen |= f
    if seen != sd.invariant_set & tops:
        raise InternalInvariantError(
            "toplex families do not cover the invariant set's toplexes"
        )
    return fams


def check_section_properties(sd):
    """Re-check the structural properties an accepted section must satisfy.

    Returns a dict of named booleans: Lyapunov monotonicity along the induced
    map, levels closed in the region and compatible, levels nested in
    relative interiors, interior shifts clear of the cut, shift overlaps only
    between neighbours, and closures of cyclically consecutive shifts
    meeting.
    """
    poset = sd.cx.poset
    out = {}
    if sd.shifts is None:
        shifts(sd)
    lv = sd.lyapunov_values
    ok = True
    for c in sd.region:
        img = sd.mvf.fv(c) & sd.region
        if any(lv[t] > lv[c] for t in img):
            ok = False
            break
    out["lyapunov_monotone"] = ok

    ok = True
    for k in range(sd.k_max):  # levels strictly below the last
        l_k = sd.levels[k]
        if poset.cl_rel(sd.region, l_k) != l_k or not sd.mvf.is_compatible(l_k):
            ok = False
            break
    out["levels_closed_compatible"] = ok

    ok = True
    for k in range(1, sd.k_max + 1):
        if not sd.levels[k - 1] <= poset.int_rel(sd.region, sd.levels[k]):
            ok = False
            break
    out["levels_nested_interiors"] = ok

    ok = True
    for i in range(1, sd.k_max - 1):
        if sd.cut & poset.closure(sd.shifts[i]):
            ok = False
            break
    out["interior_shifts_avoid_cut"] = ok

    ok = True
    for i in range(sd.k_max):
        for j in range(i + 1, sd.k_max):
            if sd.shifts[i] & sd.shifts[j] and j != i + 1:
                ok = False
    out["overlap_only_neighbours"] = ok

    ok = True
    for i in range(sd.k_max):
        a = poset.closure(sd.shifts[i])
        b = poset.closure(sd.shifts[(i + 1) % sd.k_max])
        if not a & b:
            ok = False
            break
    out["consecutive_closures_meet"] = ok
    return out


def propose_sections(cx, mvf, invariant_set):
    """Candidate sections: single multivectors of the set, in stable order."""
    mvs = {mvf.mv_index(c) for c in invariant_set}
    cands = [mvf.multivectors[i] for i in sorted(mvs, key=lambda i: sorted(mvf.multivectors[i]))]
    return cands

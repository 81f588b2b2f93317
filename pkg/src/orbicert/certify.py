"""Assemble the hypothesis ledger and issue periodic-orbit certificates.

A certificate for an invariant set records, entry by entry, every hypothesis
needed for the existence of a non-trivial periodic orbit inside the set's
realization: the set is a connected isolated invariant set made of regular
multivectors, its Conley index pairs up in consecutive degrees, a section
with at least three shifts exists whose every shift carries a toplex, no
toplex pair of the set has a circular intersection, the closure touches no
outflow cell, and the structural properties of the section all hold.  Every
entry is computed; the certificate is issued only when all are true.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import __version__
from .homology import conley_index_pair, homology_condition
from .mvf import DynGraph, is_isolated_invariant
from .section import (
    CoarseningDegenerateError,
    SectionRejected,
    build_section,
    check_section_properties,
    propose_sections,
    shifts,
    toplex_coarsening,
)


STRUCTURAL_NOTES = [
    "the closure of the invariant set realizes an isolating block whose exit "
    "set is the realization of the set's mouth (guaranteed by the "
    "construction of the induced multivector field; not re-tested)",
    "closed subcomplex realizations are compact ANRs (guaranteed by the "
    "cellular structure; not re-tested)",
    "for fields not derived from a flow report, the brick property of "
    "regular toplexes (empty invariant part) is the caller's hypothesis",
]


def check_regularity(cx, mvf, invariant_set):
    """True iff every multivector of the set has a vanishing index pair."""
    mvs = {mvf.mv_index(c) for c in invariant_set}
    return all(mvf.is_regular(i) for i in mvs)


def check_sharp_pair(cx, mvf, tau, sigma):
    """A pair of distinct toplexes is sharp when a one-step relay exists:
    some face of the first belongs to the second's multivector."""
    if tau == sigma:
        raise ValueError("sharp pairs are pairs of distinct toplexes")
    target = mvf.mv_index(sigma)
    return any(
        mvf.mv_index(alpha) == target for alpha in cx.poset.closure([tau])
    )


def sharp_pair_digraph(cx, mvf, toplexes):
    """Adjacency of the sharp-pair relation on the given toplexes."""
    tops = sorted(toplexes)
    idx = {t: i for i, t in enumerate(tops)}
    mv_to_top = {}
    for t in tops:
        mv_to_top[mvf.mv_index(t)] = t
    succ = {t: set() for t in tops}
    for t in tops:
        for alpha in cx.poset.closure([t]):
            i = mvf.mv_index(alpha)
            s = mv_to_top.get(i)
            if s is not None and s != t:
                succ[t].add(s)
    return tops, succ


def _reaches(succ, sources, targets, removed):
    seen = set()
    todo = [s for s in sources if s not in removed]
    while todo:
        v = todo.pop()
        if v in seen:
            continue
        seen.add(v)
        if v in targets:
            return True
        for w in succ.get(v, ()):
            if w not in removed and w not in seen:
                todo.append(w)
    return False


def _has_cycle_reachable_from(succ, sources, removed):
    seen = set()
    todo = [s for s in sources if s not in removed]
    reach = set()
    while todo:
        v = todo.pop()
        if v in reach:
            continue
        reach.add(v)
        for w in succ.get(v, ()):
            if w not in removed:
                todo.append(w)
    # cycle detection inside the reachable part
    color = {}
    for root in reach:
        if color.get(root):
            continue
        stack = [(root, iter(succ.get(root, ())))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if w in removed or w not in reach:
                    continue
                c = color.get(w)
                if c == 1:
                    return True
                if c is None:
                    color[w] = 1
                    stack.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
            if not advanced:
                color[v] = 2
                stack.pop()
    return False


def check_condition_f_direct(cx, mvf, invariant_set, coarsening, report=None):
    """Direct graph check of the coarsening's forward-motion condition.

    For each family index i, with the (i+1)-th family removed from the sharp
    pair digraph: no toplex of family i may reach family i+2, and every cycle
    reachable from family i must die once the draining toplexes (those whose
    exit cells all leave the invariant set) are removed as well.
    """
    a = frozenset(invariant_set)
    tops = sorted(a & cx.toplexes())
    cover = set().union(*coarsening) if coarsening else set()
    if cover != set(tops):
        raise ValueError("coarsening does not cover the set's toplexes")
    if len(coarsening) != len({frozenset(f) for f in coarsening}) or sum(
        len(f) for f in coarsening
    ) != len(cover):
        raise ValueError("coarsening families are not pairwise disjoint")
    _, succ = sharp_pair_digraph(cx, mvf, tops)
    mo_a = cx.poset.closure(a) - a
    outflow = frozenset(report.outflow) if report is not None else frozenset()
    drains = set()
    for t in tops:
        exits = cx.poset.closure([t]) - mvf.multivector_of(t)
        if exits <= (mo_a | outflow):
            drains.add(t)
    p = len(coarsening)
    for i in range(p):
        removed = set(coarsening[(i + 1) % p])
        src = coarsening[i]
        tgt = set(coarsening[(i + 2) % p])
        if _reaches(succ, src, tgt - removed, removed):
            return False
        if _has_cycle_reachable_from(succ, src, removed | drains):
            return False
    return True


@dataclass
class Certificate:
    complex_hash: str
    field_hash: str
    invariant_set: list
    conley_index: list
    r_values: list
    section: list
    k_max: int
    shift_toplexes: list
    ledger: dict
    structural: list = field(default_factory=lambda: list(STRUCTURAL_NOTES))
    tool_version: str = __version__

    def to_json(self):
        return {
            "certified": True,
            "complex_hash": self.complex_hash,
            "field_hash": self.field_hash,
            "invariant_set": self.invariant_set,
            "conley_index": self.conley_index,
            "r": self.r_values,
            "section": self.section,
            "k_max": self.k_max,
            "shift_toplexes": self.shift_toplexes,
            "ledger": self.ledger,
            "structural": self.structural,
            "tool_version": self.tool_version,
        }


@dataclass
class Rejection:
    ledger: dict
    complex_hash: str = ""
    field_hash: str = ""

    def failed(self):
        return sorted(k for k, v in self.ledger.items() if not v["ok"])

    def to_json(self):
        return {
            "certified": False,
            "complex_hash": self.complex_hash,
            "field_hash": self.field_hash,
            "failed": self.failed(),
            "ledger": self.ledger,
            "tool_version": __version__,
        }


def content_hash(obj):
    if isinstance(obj, (dict, list)):
        data = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    else:
        data = str(obj)
    return hashlib.sha256(data.encode()).hexdigest()


def certify(cx, mvf, invariant_set, section=None, report=None, check_f=False):
    """Run every hypothesis check and issue a Certificate or a Rejection.

    `section` may be given explicitly (raising on malformed candidates) or
    left None for auto-proposal among the set's own multivectors.  `report`
    is the transversality report of a flow-derived field; without it the
    flow-level entries (circular intersections, outflow, verified toplexes)
    cannot be established and certification is refused.
    """
    a = frozenset(invariant_set)
    ledger = {}

    ok, diag = is_isolated_invariant(cx, mvf, a)
    connected = cx.poset.is_connected(a)
    ledger["isolated_invariant"] = {
        "ok": bool(a) and connected and ok,
        "evidence": dict(diag, nonempty=bool(a), connected=connected),
    }

    reg = bool(a) and check_regularity(cx, mvf, a)
    ledger["regular_multivectors"] = {"ok": reg, "evidence": {}}

    index = None
    r_vals = []
    if cx.poset.is_locally_closed(a):
        index = conley_index_pair(cx, a)
        r_vals = homology_condition(index)
    ledger["homology_condition"] = {
        "ok": bool(r_vals),
        "evidence": {"conley_index": list(index) if index is not None else None,
                     "r": r_vals},
    }

    sd = None
    chosen = None
    if section is not None:
        try:
            sd = build_section(cx, mvf, a, frozenset(section))
            chosen = frozenset(section)
            ledger["section"] = {"ok": True, "evidence": {"section": sorted(chosen)}}
        except SectionRejected as e:
            ledger["section"] = {
                "ok": False,
                "evidence": {"condition": e.condition, "detail": e.detail},
            }
    else:
        attempts = []
        for cand in propose_sections(cx, mvf, a) if ledger["isolated_invariant"]["ok"] else []:
            try:
                sd = build_section(cx, mvf, a, cand)
                chosen = cand
                break
            except SectionRejected as e:
                attempts.append({"section": sorted(cand), "condition": e.condition})
            except ValueError:
                continue
        ledger["section"] = {
            "ok": sd is not None,
            "evidence": {"section": sorted(chosen)} if sd else {"attempts": attempts},
        }

    k_max = None
    fams = None
    props = {}
    if sd is not None:
        try:
            shifts(sd)
            k_max = sd.k_max
        except SectionRejected as e:
            ledger["section"] = {
                "ok": False,
                "evidence": {"condition": e.condition, "detail": e.detail},
            }
            sd = None
    ledger["k_max"] = {
        "ok": k_max is not None and k_max >= 3,
        "evidence": {"k_max": k_max},
    }
    if sd is not None and k_max is not None:
        try:
            fams = toplex_coarsening(sd)
        except CoarseningDegenerateError as e:
            fams = None
            ledger["shift_toplexes"] = {"ok": False, "evidence": {"detail": str(e)}}
        if fams is not None:
            ledger["shift_toplexes"] = {
                "ok": True,
                "evidence": {"families": [sorted(f) for f in fams]},
            }
        props = check_section_properties(sd)
    else:
        ledger["shift_toplexes"] = {"ok": False, "evidence": {}}
    ledger["section_properties"] = {
        "ok": bool(props) and all(props.values()),
        "evidence": props,
    }

    tops = sorted(a & cx.toplexes())
    circ = []
    for i, t in enumerate(tops):
        cl_t = cx.poset.closure([t])
        for s in tops[i + 1:]:
            shared = cl_t & cx.poset.closure([s])
            if not shared:
                continue
            into_s = any(s in mvf.multivector_of(c) for c in shared)
            into_t = any(t in mvf.multivector_of(c) for c in shared)
            if into_s and into_t:
                circ.append([t, s])
    ledger["no_circular_intersection"] = {"ok": not circ, "evidence": {"pairs": circ}}

    cl_a = cx.poset.closure(a)
    if report is not None:
        bad = sorted(cl_a & frozenset(report.outflow))
        ledger["no_outflow_in_closure"] = {"ok": not bad, "evidence": {"cells": bad}}
        unverified = sorted(
            t for t in tops if not report.triangle_verified.get(t, False)
        )
        ledger["toplexes_equilibrium_free"] = {
            "ok": not unverified,
            "evidence": {"unverified": unverified},
        }
    else:
        ledger["no_outflow_in_closure"] = {
            "ok": True,
            "evidence": {"detail": "abstract field: no outflow cells exist"},
        }

    if check_f and fams is not None:
        ledger["condition_f_direct"] = {
            "ok": check_condition_f_direct(cx, mvf, a, fams, report),
            "evidence": {},
        }

    cx_hash = content_hash(cx.to_json())
    field_hash = content_hash(report.field_text) if report is not None else ""
    if all(v["ok"] for v in ledger.values()):
        return Certificate(
            complex_hash=cx_hash,
            field_hash=field_hash,
            invariant_set=sorted(a),
            conley_index=list(index),
            r_values=r_vals,
            section=sorted(chosen),
            k_max=k_max,
            shift_toplexes=[sorted(f) for f in fams],
            ledger=ledger,
        )
    return Rejection(ledger=ledger, complex_hash=cx_hash, field_hash=field_hash)

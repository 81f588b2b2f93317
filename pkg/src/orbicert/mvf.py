"""Combinatorial multivector fields and their graph dynamics.

A multivector field partitions the cells of a complex into locally closed,
non-empty multivectors.  The induced multivalued map sends a cell to the
union of its closure and its multivector; recurrence questions then reduce
to strongly connected components of one directed graph over the cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .fintop import _bits
from .homology import betti, conley_index_pair, padded


class MvfError(ValueError):
    pass


class InternalInvariantError(RuntimeError):
    """A structural property guaranteed by theory failed on actual data."""


class MultivectorField:
    def __init__(self, cx, multivectors):
        self.cx = cx
        self.multivectors = [frozenset(v) for v in multivectors]
        self._issues = self._partition_issues()
        self._mv_of = None
        if not self._issues:
            self._mv_of = {}
            for i, v in enumerate(self.multivectors):
                for c in v:
                    self._mv_of[c] = i
        self._regular = {}

    def _partition_issues(self):
        issues = []
        seen = {}
        for i, v in enumerate(self.multivectors):
            if not v:
                issues.append(f"multivector {i} is empty")
            for c in v:
                if c not in self.cx.dims:
                    issues.append(f"multivector {i} contains unknown cell {c!r}")
                elif c in seen:
                    issues.append(
                        f"partition: cell {c!r} lies in multivectors "
                        f"{seen[c]} and {i}"
                    )
                else:
                    seen[c] = i
        missing = self.cx.cells - seen.keys()
        for c in sorted(missing):
            issues.append(f"partition: cell {c!r} lies in no multivector")
        return issues

    def validate(self):
        """Report partition, non-emptiness and local-closedness violations."""
        issues = list(self._issues)
        for i, v in enumerate(self.multivectors):
            if v and all(c in self.cx.dims for c in v):
                if not self.cx.poset.is_locally_closed(v):
                    issues.append(f"multivector {i} is not locally closed")
        return issues

    def _require_valid(self):
        if self._mv_of is None:
            raise MvfError("invalid multivector field: " + "; ".join(self._issues))

    def mv_index(self, cell):
        self._require_valid()
        return self._mv_of[cell]

    def multivector_of(self, cell):
        return self.multivectors[self.mv_index(cell)]

    def fv(self, cell):
        """Induced multivalued map: closure of the cell joined with its multivector."""
        return self.cx.poset.closure([cell]) | self.multivector_of(cell)

    def is_regular(self, i):
        """A multivector is regular when its (closure, mouth) pair is acyclic."""
        if i not in self._regular:
            v = self.multivectors[i]
            bv = conley_index_pair(self.cx, v)
            self._regular[i] = all(b == 0 for b in bv)
        return self._regular[i]

    def is_critical(self, i):
        return not self.is_regular(i)

    def is_compatible(self, cells):
        """True iff the set is a union of multivectors."""
        self._require_valid()
        s = frozenset(cells)
        hit = {self._mv_of[c] for c in s}
        return all(self.multivectors[i] <= s for i in hit)

    def compatible_span(self, cells):
        """Union of all multivectors meeting the set."""
        self._require_valid()
        out = set()
        for c in cells:
            out |= self.multivectors[self._mv_of[c]]
        return frozenset(out)

    # -- serialization ----------------------------------------------------

    def to_json(self):
        return {
            "multivectors": [sorted(v) for v in sorted(self.multivectors, key=sorted)]
        }

    @classmethod
    def from_json(cls, cx, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(cx, obj["multivectors"])


def validate_mvf(cx, multivectors):
    """Report-only validation of a candidate partition."""
    return MultivectorField(cx, multivectors).validate()


@dataclass
class Component:
    cells: frozenset
    essential: bool


class DynGraph:
    """The directed graph of the induced map, restricted to a cell set.

    Vertices are cells; there is an edge from a cell to every member of its
    image.  Each multivector is internally strongly connected, so strongly
    connected components are compatible with the partition.
    """

    def __init__(self, mvf, n_cells=None):
        mvf._require_valid()
        self.mvf = mvf
        poset = mvf.cx.poset
        if n_cells is None:
            n_cells = mvf.cx.cells
        self.n_mask = poset.mask(n_cells)
        mv_masks = [poset.mask(v) for v in mvf.multivectors]
        self._succ = {}
        for i in _bits(self.n_mask):
            cell = poset._ids[i]
            m = poset._down[i] | mv_masks[mvf._mv_of[cell]]
            self._succ[i] = m & self.n_mask
        self.sccs = self._tarjan()
        self._essential = [self._is_essential(m) for m in self.sccs]
        self._scc_of = {}
        for k, m in enumerate(self.sccs):
            for i in _bits(m):
                self._scc_of[i] = k

    def _tarjan(self):
        # iterative Tarjan; emits SCCs in reverse topological order
        index = {}
        low = {}
        on_stack = set()
        stack = []
        sccs = []
        counter = [0]
        for root in _bits(self.n_mask):
            if root in index:
                continue
            work = [(root, iter(_bits(self._succ[root])))]
            index[root] = low[root] = counter[0]
            counter[0] += 1
            stack.append(root)
            on_stack.add(root)
            while work:
                v, it = work[-1]
                advanced = False
                for w in it:
                    if w == v:
                        continue
                    if w not in index:
                        index[w] = low[w] = counter[0]
                        counter[0] += 1
                        stack.append(w)
                        on_stack.add(w)
                        work.append((w, iter(_bits(self._succ[w]))))
                        advanced = True
                        break
                    if w in on_stack:
                        low[v] = min(low[v], index[w])
                if advanced:
                    continue
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
                if low[v] == index[v]:
                    m = 0
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        m |= 1 << w
                        if w == v:
                            break
                    sccs.append(m)
        return sccs

    def _is_essential(self, mask):
        mvs = set()
        for i in _bits(mask):
            cell = self.mvf.cx.poset._ids[i]
            mvs.add(self.mvf._mv_of[cell])
            if len(mvs) >= 2:
                return True
        (only,) = mvs
        return self.mvf.is_critical(only)

    def components(self):
        poset = self.mvf.cx.poset
        return [
            Component(poset.unmask(m), e)
            for m, e in zip(self.sccs, self._essential)
        ]

    def condensation_edges(self):
        """Edges between SCC indices, following the cell-level edges."""
        edges = set()
        for i in _bits(self.n_mask):
            a = self._scc_of[i]
            for j in _bits(self._succ[i]):
                b = self._scc_of[j]
                if a != b:
                    edges.add((a, b))
        return edges

    def invariant_mask(self):
        """Cells on directed routes from an essential SCC to an essential SCC."""
        ess = [k for k, e in enumerate(self._essential) if e]
        if not ess:
            return 0
        edges = self.condensation_edges()
        succ = {}
        pred = {}
        for a, b in edges:
            succ.setdefault(a, set()).add(b)
            pred.setdefault(b, set()).add(a)
        fwd = self._dag_closure(ess, succ)
        bwd = self._dag_closure(ess, pred)
        keep = fwd & bwd
        m = 0
        for k in keep:
            m |= self.sccs[k]
        return m

    @staticmethod
    def _dag_closure(seeds, nbrs):
        out = set(seeds)
        todo = list(seeds)
        while todo:
            v = todo.pop()
            for w in nbrs.get(v, ()):
                if w not in out:
                    out.add(w)
                    todo.append(w)
        return out

    def reachable_mask(self, start_mask, within_mask=None):
        if within_mask is None:
            within_mask = self.n_mask
        seen = start_mask & within_mask
        frontier = seen
        while frontier:
            nxt = 0
            for i in _bits(frontier):
                nxt |= self._succ[i]
            nxt &= within_mask & ~seen
            seen |= nxt
            frontier = nxt
        return seen


def essential_components(cx, mvf, n_cells):
    """All SCCs of the induced graph on the set, flagged essential.

    A component is essential when it contains a critical multivector's cell
    or spans at least two multivectors; inside a single regular multivector
    no solution can keep exiting in both time directions.
    """
    return DynGraph(mvf, n_cells).components()


def invariant_part(cx, mvf, n_cells):
    """Cells carrying an essential solution that stays in the set."""
    g = DynGraph(mvf, n_cells)
    return cx.poset.unmask(g.invariant_mask())


def is_isolated_invariant(cx, mvf, cells):
    """Decide isolated invariance; returns (verdict, diagnostics)."""
    s = frozenset(cells)
    poset = cx.poset
    diag = {}
    diag["invariant"] = invariant_part(cx, mvf, s) == s
    diag["compatible"] = mvf.is_compatible(s)
    diag["locally_closed"] = poset.is_locally_closed(s)
    cl = poset.closure(s)
    g = DynGraph(mvf, cl)
    s_mask = poset.mask(s)
    out_mask = poset.mask(cl) & ~s_mask
    first_exit = 0
    for i in _bits(s_mask):
        first_exit |= g._succ[i]
    first_exit &= out_mask
    # cells of cl S able to reach S again
    pred = {}
    for i in _bits(g.n_mask):
        for j in _bits(g._succ[i]):
            pred.setdefault(j, []).append(i)
    back = s_mask
    todo = list(_bits(s_mask))
    while todo:
        v = todo.pop()
        for w in pred.get(v, ()):
            if not (back >> w & 1):
                back |= 1 << w
                todo.append(w)
    diag["isolated"] = first_exit & back == 0
    return all(diag.values()), diag


@dataclass
class MorseNode:
    cells: frozenset
    index: tuple
    issues: list = field(default_factory=list)


@dataclass
class MorseDecomposition:
    nodes: list
    edges: list

    def to_json(self):
        return {
            "morse_sets": [
                {"cells": sorted(n.cells), "conley_index": list(n.index)}
                for n in self.nodes
            ],
            "edges": [[a, b] for a, b in self.edges],
        }

    def to_graphviz(self):
        lines = ["digraph conley_morse {"]
        for k, n in enumerate(self.nodes):
            label = f"M{k} {tuple(n.index)} ({len(n.cells)} cells)"
            lines.append(f'  m{k} [label="{label}"];')
        for a, b in sorted(self.edges):
            lines.append(f"  m{a} -> m{b};")
        lines.append("}")
        return "\n".join(lines)


def find_invariant_sets(cx, mvf, n_cells=None, exclude_cells=frozenset()):
    """Isolated invariant sets with a nontrivial Conley index.

    The full Morse decomposition may contain components whose index pair is
    homologically trivial (typical for pass-through regions of flow-derived
    fields); a trivial index supports no conclusion about the underlying
    flow, so those components are not reported as findings.  Returns
    (selected MorseNodes, full MorseDecomposition).
    """
    md = morse_decomposition(cx, mvf, n_cells, exclude_cells)
    found = [n for n in md.nodes if any(b != 0 for b in n.index)]
    return found, md


def morse_decomposition(cx, mvf, n_cells=None, exclude_cells=frozenset()):
    """Morse sets (invariant hulls of essential SCCs) with indices and order.

    Components meeting `exclude_cells` are dropped; the pipeline passes the
    outflow cells here, whose singleton multivectors do not model the flow.
    """
    if n_cells is None:
        n_cells = cx.cells
    poset = cx.poset
    g = DynGraph(mvf, n_cells)
    excl_mask = poset.mask(frozenset(exclude_cells) & frozenset(n_cells))
    ess = [
        k
        for k, e in enumerate(g._essential)
        if e and g.sccs[k] & excl_mask == 0
    ]
    nodes = []
    node_masks = []
    for k in ess:
        scc_cells = poset.unmask(g.sccs[k])
        span = mvf.compatible_span(scc_cells)
        hull = poset.locally_closed_hull(span) & frozenset(n_cells)
        m = invariant_part(cx, mvf, hull)
        issues = []
        if not poset.is_locally_closed(m):
            raise InternalInvariantError(
                "invariant hull of an essential component is not locally closed"
            )
        if not m >= scc_cells:
            issues.append("hull lost component cells")
        nodes.append(MorseNode(m, conley_index_pair(cx, m), issues))
        node_masks.append(poset.mask(m))

    # order by reachability in the full graph on n_cells, then reduce
    order = sorted(range(len(nodes)), key=lambda k: sorted(nodes[k].cells))
    nodes = [nodes[k] for k in order]
    node_masks = [node_masks[k] for k in order]
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for a in range(n):
        ra = g.reachable_mask(node_masks[a])
        for b in range(n):
            if a != b and ra & node_masks[b]:
                reach[a][b] = True
    edges = []
    for a in range(n):
        for b in range(n):
            if not reach[a][b]:
                continue
            if any(reach[a][c] and reach[c][b] for c in range(n) if c not in (a, b)):
                continue
            edges.append((a, b))
    return MorseDecomposition(nodes, edges)

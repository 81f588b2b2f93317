"""Finite T0 spaces as posets.

Open sets are the up-sets of the partial order, closed sets the down-sets;
the closure of a cell is the set of its faces, the smallest open set around
it the set of its cofaces.  Everything downstream (cell complexes,
multivector fields, sections) is built over these operators.

Only the covering relation is stored; the full order is recovered by
transitive closure at construction time and kept as per-element reachability
bitmasks, so all set operators are a handful of big-int operations.
"""

from __future__ import annotations


class AmbientError(ValueError):
    """A cell set refers to elements outside its ambient poset."""


class PosetError(ValueError):
    """The input relation is not a partial order."""


def _bits(mask):
    # indices of set bits, ascending
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinitePoset:
    """A finite poset over opaque, hashable cell identifiers.

    `covers` is any iterable of pairs (a, b) meaning a < b; the stored
    relation is the reflexive-transitive closure.  Immutable once built.
    """

    def __init__(self, elements, covers=()):
        self._ids = sorted(elements, key=lambda e: (str(type(e)), str(e)))
        self._index = {e: i for i, e in enumerate(self._ids)}
        if len(self._index) != len(self._ids):
            raise PosetError("duplicate elements")
        n = len(self._ids)
        below = [set() for _ in range(n)]  # direct predecessors
        above = [set() for _ in range(n)]
        for a, b in covers:
            if a not in self._index or b not in self._index:
                raise AmbientError(f"cover ({a!r}, {b!r}) uses unknown element")
            if a == b:
                continue
            ia, ib = self._index[a], self._index[b]
            below[ib].add(ia)
            above[ia].add(ib)

        # topological order; a cycle would violate antisymmetry
        indeg = [len(below[i]) for i in range(n)]
        order = [i for i in range(n) if indeg[i] == 0]
        head = 0
        while head < len(order):
            i = order[head]
            head += 1
            for j in above[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    order.append(j)
        if len(order) != n:
            raise PosetError("relation has a cycle (antisymmetry violated)")

        down = [0] * n
        for i in order:
            m = 1 << i
            for j in below[i]:
                m |= down[j]
            down[i] = m
        up = [1 << i for i in range(n)]
        for i in reversed(order):
            m = up[i]
            for j in below[i]:
                up[j] |= m
        self._down = down
        self._up = up
        self._all = (1 << n) - 1

    # -- basics --------------------------------------------------------

    def __len__(self):
        return len(self._ids)

    def __contains__(self, e):
        return e in self._index

    def __iter__(self):
        return iter(self._ids)

    @property
    def elements(self):
        return frozenset(self._ids)

    def le(self, a, b):
        """a <= b in the face order."""
        return bool(self._down[self._idx(b)] >> self._idx(a) & 1)

    def _idx(self, e):
        try:
            return self._index[e]
        except KeyError:
            raise AmbientError(f"{e!r} is not an element of this poset") from None

    def mask(self, cells):
        m = 0
        for e in cells:
            m |= 1 << self._idx(e)
        return m

    def unmask(self, mask):
        return frozenset(self._ids[i] for i in _bits(mask))

    # -- Alexandrov operators ------------------------------------------

    def closure_mask(self, mask):
        m = 0
        for i in _bits(mask):
            m |= self._down[i]
        return m

    def opn_mask(self, mask):
        m = 0
        for i in _bits(mask):
            m |= self._up[i]
        return m

    def closure(self, cells):
        """Smallest down-closed superset: the union of cell closures."""
        return self.unmask(self.closure_mask(self.mask(cells)))

    def opn(self, cells):
        """Smallest up-closed (open) superset: the union of stars."""
        return self.unmask(self.opn_mask(self.mask(cells)))

    def mouth(self, cells):
        """closure(A) minus A."""
        m = self.mask(cells)
        return self.unmask(self.closure_mask(m) & ~m)

    def is_closed(self, cells):
        m = self.mask(cells)
        return self.closure_mask(m) == m

    def is_open(self, cells):
        m = self.mask(cells)
        return self.opn_mask(m) == m

    def is_locally_closed(self, cells):
        """True iff the mouth of the set is closed."""
        m = self.mask(cells)
        mo = self.closure_mask(m) & ~m
        return self.closure_mask(mo) == mo

    def locally_closed_hull(self, cells):
        """Smallest locally closed superset: closure(A) & opn(A)."""
        m = self.mask(cells)
        return self.unmask(self.closure_mask(m) & self.opn_mask(m))

    # -- fences ---------------------------------------------------------

    def _comp_neighbors(self, i, inside):
        return (self._down[i] | self._up[i]) & inside & ~(1 << i)

    def connected_components(self, cells):
        """Partition into maximal fence-connected pieces.

        Consecutive fence elements must be comparable and both lie in the
        given set.
        """
        rest = self.mask(cells)
        out = []
        while rest:
            i = (rest & -rest).bit_length() - 1
            comp = 1 << i
            frontier = comp
            while frontier:
                nxt = 0
                for j in _bits(frontier):
                    nxt |= self._comp_neighbors(j, rest)
                nxt &= ~comp
                comp |= nxt
                frontier = nxt
            out.append(self.unmask(comp))
            rest &= ~comp
        return out

    def is_connected(self, cells):
        if not cells:
            return False
        return len(self.connected_components(cells)) == 1

    def fence_distance(self, cells, a, b):
        """Length of a shortest fence inside the set; inf across components."""
        inside = self.mask(cells)
        ia, ib = self._idx(a), self._idx(b)
        if not (inside >> ia & 1) or not (inside >> ib & 1):
            raise AmbientError("fence endpoints must lie in the given set")
        if ia == ib:
            return 0
        seen = 1 << ia
        frontier = seen
        dist = 0
        while frontier:
            dist += 1
            nxt = 0
            for j in _bits(frontier):
                nxt |= self._comp_neighbors(j, inside)
            nxt &= ~seen
            if nxt >> ib & 1:
                return dist
            seen |= nxt
            frontier = nxt
        return float("inf")

    def fence_distances_from(self, cells, sources):
        """Multi-source fence BFS; returns {cell: distance} for one component."""
        inside = self.mask(cells)
        src = self.mask(sources)
        if src & ~inside:
            raise AmbientError("sources must lie in the given set")
        dist = {}
        seen = src
        frontier = src
        d = 0
        for j in _bits(src):
            dist[self._ids[j]] = 0
        while frontier:
            d += 1
            nxt = 0
            for j in _bits(frontier):
                nxt |= self._comp_neighbors(j, inside)
            nxt &= ~seen
            for j in _bits(nxt):
                dist[self._ids[j]] = d
            seen |= nxt
            frontier = nxt
        return dist

    # -- subspace operators ----------------------------------------------

    def _check_subspace(self, b_mask, r_mask):
        if b_mask & ~r_mask:
            raise AmbientError("set is not contained in the subspace")

    def cl_rel(self, space, cells):
        """Closure in the subspace topology of `space`."""
        r, b = self.mask(space), self.mask(cells)
        self._check_subspace(b, r)
        return self.unmask(self.closure_mask(b) & r)

    def opn_rel(self, space, cells):
        r, b = self.mask(space), self.mask(cells)
        self._check_subspace(b, r)
        return self.unmask(self.opn_mask(b) & r)

    def int_rel(self, space, cells):
        """Subspace interior: cells whose relative star stays inside."""
        r, b = self.mask(space), self.mask(cells)
        self._check_subspace(b, r)
        out = 0
        for i in _bits(b):
            if self._up[i] & r & ~b == 0:
                out |= 1 << i
        return self.unmask(out)

    def bd_rel(self, space, cells):
        """Subspace boundary: cl_R(B) & cl_R(R - B)."""
        r, b = self.mask(space), self.mask(cells)
        self._check_subspace(b, r)
        return self.unmask(self.closure_mask(b) & self.closure_mask(r & ~b) & r)


class CellSet:
    """A validated subset of a poset's elements, tied to its ambient poset."""

    __slots__ = ("poset", "cells")

    def __init__(self, poset, cells):
        cells = frozenset(cells)
        for c in cells:
            if c not in poset:
                raise AmbientError(f"{c!r} is not an element of the ambient poset")
        self.poset = poset
        self.cells = cells

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)

    def __contains__(self, c):
        return c in self.cells

    def __eq__(self, other):
        if isinstance(other, CellSet):
            return self.poset is other.poset and self.cells == other.cells
        return self.cells == frozenset(other)

    def __hash__(self):
        return hash((id(self.poset), self.cells))

    def __repr__(self):
        return f"CellSet({sorted(map(str, self.cells))})"

    def closure(self):
        return CellSet(self.poset, self.poset.closure(self.cells))

    def opn(self):
        return CellSet(self.poset, self.poset.opn(self.cells))

    def mouth(self):
        return CellSet(self.poset, self.poset.mouth(self.cells))

    def is_locally_closed(self):
        return self.poset.is_locally_closed(self.cells)

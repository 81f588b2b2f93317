"""Relative homology over the rationals by exact sparse elimination.

Betti numbers of pairs of closed cell sets are the certificates' currency,
so every rank here is computed with `fractions.Fraction` arithmetic; no
floating point enters at any stage.
"""

from __future__ import annotations

from fractions import Fraction


class HomologyError(ValueError):
    pass


class ChainComplex:
    """Chain complex with exact rational boundary maps.

    `ranks[k]` is the dimension of the degree-k chain group; `boundaries[k-1]`
    is a pair (nrows, cols) describing the map from degree k to degree k-1,
    with cols a list of {row_index: Fraction} columns.  `labels`, when
    present, names the basis cells per degree.
    """

    def __init__(self, ranks, boundaries, labels=None):
        self.ranks = list(ranks)
        self.boundaries = list(boundaries)
        self.labels = labels
        for k, (nrows, cols) in enumerate(self.boundaries):
            if nrows != self.ranks[k]:
                raise HomologyError("boundary row count does not match rank")
            if len(cols) != self.ranks[k + 1]:
                raise HomologyError("boundary column count does not match rank")

    @property
    def top_degree(self):
        return len(self.ranks) - 1

    def boundary_matrix(self, k):
        """The map from degree k into degree k-1, or None outside range."""
        if 1 <= k <= self.top_degree:
            return self.boundaries[k - 1]
        return None

    def check_dd_zero(self):
        """True iff consecutive boundary maps compose to zero."""
        for k in range(2, self.top_degree + 1):
            _, cols_k = self.boundaries[k - 1]
            _, cols_km1 = self.boundaries[k - 2]
            for col in cols_k:
                acc = {}
                for mid, a in col.items():
                    for row, b in cols_km1[mid].items():
                        acc[row] = acc.get(row, 0) + a * b
                if any(v != 0 for v in acc.values()):
                    return False
        return True


def sparse_rank(nrows, cols):
    """Rank of a sparse rational matrix given as {row: value} columns.

    Gaussian elimination with a Markowitz-style pivot choice: among the
    lightest remaining columns, pick the entry whose row meets the fewest
    columns, which keeps fill-in small on boundary matrices.
    """
    cols = [dict(c) for c in cols]
    live = {j for j, c in enumerate(cols) if c}
    row_occ = {}
    for j in live:
        for r in cols[j]:
            row_occ.setdefault(r, set()).add(j)
    rank = 0
    while live:
        pj = min(live, key=lambda j: (len(cols[j]), j))
        col = cols[pj]
        pr = min(col, key=lambda r: (len(row_occ[r]), r))
        pv = col[pr]
        rank += 1
        live.discard(pj)
        for r in col:
            row_occ[r].discard(pj)
        targets = [j for j in row_occ.get(pr, ()) if j in live]
        for j in targets:
            other = cols[j]
            factor = other[pr] / pv
            for r, v in col.items():
                if r == pr:
                    continue
                cur = other.get(r)
                if cur is None:
                    other[r] = -factor * v
                    row_occ.setdefault(r, set()).add(j)
                else:
                    cur -= factor * v
                    if cur == 0:
                        del other[r]
                        row_occ[r].discard(j)
                    else:
                        other[r] = cur
            del other[pr]
            row_occ[pr].discard(j)
            if not other:
                live.discard(j)
        row_occ.pop(pr, None)
    return rank


def betti(cc):
    """Betti vector (beta_0, ..., beta_top) of an exact chain complex."""
    if not cc.check_dd_zero():
        raise HomologyError("boundary squared is nonzero; invalid chain complex")
    top = cc.top_degree
    ranks_of_maps = []
    for k in range(1, top + 1):
        nrows, cols = cc.boundaries[k - 1]
        ranks_of_maps.append(sparse_rank(nrows, cols))
    out = []
    for k in range(top + 1):
        dim_k = cc.ranks[k]
        r_k = ranks_of_maps[k - 1] if k >= 1 else 0
        r_kp1 = ranks_of_maps[k] if k < top else 0
        out.append(dim_k - r_k - r_kp1)
    return tuple(out)


def padded(bv, degree):
    """Betti vector extended with zeros through the given degree."""
    bv = tuple(bv)
    if len(bv) >= degree + 1:
        return bv
    return bv + (0,) * (degree + 1 - len(bv))


def euler_characteristic(bv):
    return sum((-1) ** k * b for k, b in enumerate(bv))


def conley_index_pair(cx, cells):
    """Conley index of a locally closed set: homology of (cl S, mouth S).

    Returned padded through the ambient complex dimension.
    """
    s = frozenset(cells)
    if not cx.poset.is_locally_closed(s):
        raise HomologyError("set is not locally closed; no canonical index pair")
    cl = cx.poset.closure(s)
    mo = cl - s
    bv = betti(cx.chain_complex(cl, mo))
    return padded(bv, cx.dim())


def homology_condition(bv):
    """Degree-pairing test on a Betti vector.

    Returns the sorted list of r in {0, 1} with beta_{2n+r} = beta_{2n+1+r}
    for every n (zero outside the stored range), provided the vector is not
    identically zero; the empty list signals failure.
    """
    bv = tuple(bv)
    if all(b == 0 for b in bv):
        return []
    out = []
    for r in (0, 1):
        ok = True
        start = r - 2  # one pair below range catches an unpaired beta_0
        for lo in range(start, len(bv), 2):
            a = bv[lo] if 0 <= lo < len(bv) else 0
            b = bv[lo + 1] if 0 <= lo + 1 < len(bv) else 0
            if a != b:
                ok = False
                break
        if ok:
            out.append(r)
    return out

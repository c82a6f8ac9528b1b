"""Rooted 3-uniform hypertrees and their level decomposition.

A tree edge is a triple ``(parent, childA, childB)``. Builders number
vertices breadth-first with the root at 0, children in label order, so
within a level vertex ids follow the lexicographic order of the label
sequences that identify them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from stedi.errors import DomainError
from stedi.hypergraph import ValidationReport

# Largest tree the builders will materialize.
MAX_VERTICES = 50_000_000


class Hypertree:
    """A rooted hypertree on vertices ``0 .. n-1`` with root 0.

    The constructor accepts malformed input so that
    :func:`validate_hypertree` can report on it; derived structure (levels,
    parents) is computed by a breadth-first walk from the root and ignores
    anything unreachable.
    """

    def __init__(self, n, edges):
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 3)
        if n < 1:
            raise DomainError("a hypertree has at least one vertex")
        if len(e) and (e.min() < 0 or e.max() >= n):
            raise DomainError(f"tree edge vertex outside [0, {n})")
        e = np.ascontiguousarray(e)
        e.flags.writeable = False
        self.n = int(n)
        self.edges = e

    def __repr__(self):
        return f"Hypertree(n={self.n}, edges={len(self.edges)}, height={self.height})"

    def __eq__(self, other):
        if not isinstance(other, Hypertree):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    __hash__ = None

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def child_edges(self):
        """CSR ``(indptr, edge_ids)`` of the edges each vertex is parent of,
        in edge order."""
        par = self.edges[:, 0]
        order = np.argsort(par, kind="stable")
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(par, minlength=self.n), out=indptr[1:])
        return indptr, order.astype(np.int64)

    def children_of(self, v):
        indptr, ids = self.child_edges
        return ids[indptr[v]:indptr[v + 1]]

    @cached_property
    def forward_degree(self):
        return np.bincount(self.edges[:, 0], minlength=self.n)

    @cached_property
    def _walk(self):
        # Breadth-first from the root; a vertex is entered only once.
        level = np.full(self.n, -1, dtype=np.int64)
        parent_edge = np.full(self.n, -1, dtype=np.int64)
        order = [0]
        level[0] = 0
        indptr, ids = self.child_edges
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            for ei in ids[indptr[v]:indptr[v + 1]]:
                for c in self.edges[ei, 1:]:
                    if level[c] < 0:
                        level[c] = level[v] + 1
                        parent_edge[c] = ei
                        order.append(int(c))
        return level, parent_edge, np.asarray(order, dtype=np.int64)

    @property
    def level(self):
        return self._walk[0]

    @property
    def parent_edge(self):
        """Index of the edge in which each vertex is a child, or -1."""
        return self._walk[1]

    @property
    def bfs_order(self):
        return self._walk[2]

    @cached_property
    def levels(self):
        """Vertex arrays ``V_0 .. V_h`` in breadth-first order."""
        lv = self.level[self.bfs_order]
        h = int(lv.max()) if len(lv) else 0
        bounds = np.searchsorted(lv, np.arange(h + 2))
        return [self.bfs_order[bounds[i]:bounds[i + 1]] for i in range(h + 1)]

    @property
    def height(self):
        return len(self.levels) - 1

    @property
    def level_sizes(self):
        return [len(v) for v in self.levels]

    def parent_of(self, v):
        """``(parent, sibling)`` for a non-root vertex, None for the root."""
        ei = self.parent_edge[v]
        if ei < 0:
            return None
        p, a, b = (int(x) for x in self.edges[ei])
        return p, (b if a == v else a)

    @cached_property
    def bfs_edges(self):
        """Edge ids ordered so every edge's parent is already covered."""
        pe = self.parent_edge[self.bfs_order]
        seen = np.zeros(len(self.edges), dtype=bool)
        out = []
        for ei in pe:
            if ei >= 0 and not seen[ei]:
                seen[ei] = True
                out.append(int(ei))
        return np.asarray(out, dtype=np.int64)

    def truncate(self, max_level):
        """Sub-hypertree on levels ``0 .. max_level``, relabeled
        breadth-first. Returns ``(tree, ids)`` with ``ids[k]`` the original
        id of new vertex ``k``."""
        keep = self.bfs_order[self.level[self.bfs_order] <= max_level]
        new_id = np.full(self.n, -1, dtype=np.int64)
        new_id[keep] = np.arange(len(keep))
        eids = self.bfs_edges
        eids = eids[self.level[self.edges[eids, 0]] < max_level]
        return Hypertree(len(keep), new_id[self.edges[eids]]), keep


def perfect_size(d, h):
    """``((2d)^(h+1) - 1) / (2d - 1)`` as an exact integer."""
    if d < 1 or h < 0:
        raise DomainError("need d >= 1 and h >= 0")
    return ((2 * d) ** (h + 1) - 1) // (2 * d - 1)


def d_sequence_tree(degs):
    """Every vertex at level ``j - 1`` has ``degs[j-1]`` child edges."""
    degs = [int(x) for x in degs]
    if any(x < 1 for x in degs):
        raise DomainError("forward degrees must be >= 1")
    total, width = 1, 1
    for x in degs:
        width *= 2 * x
        total += width
        if total > MAX_VERTICES:
            raise DomainError(f"tree would exceed {MAX_VERTICES} vertices")
    blocks = []
    start, width = 0, 1
    for x in degs:
        parents = np.repeat(np.arange(start, start + width), x)
        first = start + width + 2 * np.arange(width * x)
        blocks.append(np.stack([parents, first, first + 1], axis=1))
        start += width
        width *= 2 * x
    edges = np.concatenate(blocks) if blocks else np.empty((0, 3), dtype=np.int64)
    return Hypertree(total, edges)


def perfect_d_ary(d, h):
    if d < 1 or h < 0:
        raise DomainError("need d >= 1 and h >= 0")
    if perfect_size(d, h) > MAX_VERTICES:
        raise DomainError(f"tree would exceed {MAX_VERTICES} vertices")
    return d_sequence_tree([d] * h)


def almost_perfect(d, h, t_remove):
    """Perfect d-ary tree of height h minus its ``2 t_remove`` smallest
    leaves in lexicographic order. Leaves go in sibling pairs, so exactly
    ``t_remove`` last-level edges disappear."""
    T = perfect_d_ary(d, h)
    if t_remove < 0 or 2 * t_remove > (2 * d) ** h:
        raise DomainError(f"cannot remove {2 * t_remove} of {(2 * d) ** h} leaves")
    if t_remove == 0:
        return T
    # Last-level edges are the final (2d)^h / 2 rows, in leaf order.
    n_last = (2 * d) ** h // 2
    first = len(T.edges) - n_last
    gone = T.edges[first:first + t_remove, 1:].ravel()
    keep = np.ones(T.n, dtype=bool)
    keep[gone] = False
    new_id = np.cumsum(keep) - 1
    edges = np.delete(T.edges, np.arange(first, first + t_remove), axis=0)
    return Hypertree(int(keep.sum()), new_id[edges])


def largest_perfect_at_most(d, n):
    if n < 1:
        raise DomainError("need n >= 1")
    h = 0
    while perfect_size(d, h + 1) <= n:
        h += 1
    return perfect_d_ary(d, h)


def hyperstar(size):
    """A single vertex with ``size`` child edges."""
    return d_sequence_tree([size]) if size else Hypertree(1, [])


def validate_hypertree(T):
    report = ValidationReport()
    e = T.edges
    for i, (p, a, b) in enumerate(e.tolist()):
        if len({p, a, b}) < 3:
            report.add("degenerate_edge", (i,), f"edge {p} {a} {b}")
    child_count = np.bincount(e[:, 1:].ravel(), minlength=T.n)
    if child_count[0]:
        report.add("root_has_parent", (0,))
    for v in np.flatnonzero(child_count > 1):
        report.add("multiple_parents", (int(v),), f"{int(child_count[v])} parent edges")
    for v in np.flatnonzero(child_count[1:] == 0) + 1:
        report.add("no_parent", (int(v),))
    unreached = np.flatnonzero(T.level < 0)
    for v in unreached:
        report.add("disconnected", (int(v),))
    if T.n != 2 * len(e) + 1:
        report.add("vertex_edge_count", (T.n, len(e)), "need |V| = 2|E| + 1")
    return report


@dataclass
class LevelDecomposition:
    i0: int
    t: int
    ell: list
    L: list
    T0: Hypertree
    T0_ids: np.ndarray  # T-vertex id of each T0 vertex
    eps: float
    n: int

    @property
    def L0(self):
        return self.L[0]


def decompose_levels(T, eps, n):
    """Split T at ``i0``, the last level of the longest prefix of levels
    with ``|V_i| <= eps n``; ``L_i = V_(i0 + i)`` for ``i`` in ``0 .. t``."""
    bound = eps * n
    if bound < 1:
        raise DomainError(f"eps * n = {bound} < 1")
    sizes = T.level_sizes
    i0 = 0
    while i0 + 1 < len(sizes) and sizes[i0 + 1] <= bound:
        i0 += 1
    L = T.levels[i0:]
    T0, ids = T.truncate(i0)
    return LevelDecomposition(i0=i0, t=T.height - i0, ell=[len(x) for x in L], L=L,
                              T0=T0, T0_ids=ids, eps=eps, n=n)


def level_bounds_hold(dec, d):
    """The perfect-tree inequalities ``eps n >= l0 > eps n / 2d`` and
    ``t <= 1 + log2(1 / eps)``; meaningful only when ``t >= 1``."""
    bound = dec.eps * dec.n
    return (bound >= dec.ell[0] > bound / (2 * d)
            and dec.t <= 1 + math.log2(1 / dec.eps))

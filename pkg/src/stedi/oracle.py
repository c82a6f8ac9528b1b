"""Exhaustive backtracking embedder for tiny instances.

Edges of T are placed breadth-first. Two symmetries are pruned: the two
children of an edge are interchangeable when their subtrees have the same
shape, and sibling edges of the same shape are placed in increasing order
of their smaller image. Both prunings keep at least one embedding from
every orbit, so the search stays complete.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stedi.errors import DomainError

MAX_M = 21
MAX_TREE = 13


@dataclass
class OracleResult:
    embeddable: bool | None      # None when the budget ran out
    witness: np.ndarray | None
    nodes_explored: int
    exhausted: bool              # True when the answer is a full search

    def to_dict(self):
        return {"embeddable": self.embeddable,
                "witness": None if self.witness is None else self.witness.tolist(),
                "nodes_explored": self.nodes_explored, "exhausted": self.exhausted}


def _shapes(T):
    """Canonical shape id per vertex and per edge (isomorphism classes of
    rooted subtrees)."""
    vshape = [None] * T.n
    eshape = [None] * len(T.edges)
    for v in T.bfs_order[::-1].tolist():
        kids = []
        for ei in T.children_of(v).tolist():
            _, a, b = T.edges[ei].tolist()
            eshape[ei] = tuple(sorted((vshape[a], vshape[b])))
            kids.append(eshape[ei])
        vshape[v] = tuple(sorted(kids))
    return vshape, eshape


def oracle_embed(S, T, budget=10**7, force=False):
    if not force and (S.m > MAX_M or T.n > MAX_TREE):
        raise DomainError(f"oracle limited to m <= {MAX_M}, |V(T)| <= {MAX_TREE}; pass force")
    if T.n > S.m:
        return OracleResult(False, None, 0, True)
    m = S.m
    pairs = [[] for _ in range(m)]
    for a, b, c in S.triples.tolist():
        pairs[a].append((b, c))
        pairs[b].append((a, c))
        pairs[c].append((a, b))
    vshape, eshape = _shapes(T)
    order = T.bfs_edges.tolist()
    edges = T.edges.tolist()
    # prev_same[k]: position of the previous sibling edge with the same shape.
    prev_same = [-1] * len(order)
    last_seen = {}
    for k, ei in enumerate(order):
        key = (edges[ei][0], eshape[ei])
        prev_same[k] = last_seen.get(key, -1)
        last_seen[key] = k
    twin = [vshape[edges[ei][1]] == vshape[edges[ei][2]] for ei in order]

    phi = [-1] * T.n
    used = [False] * m
    low = [0] * len(order)
    nodes = 0

    def place(k):
        nonlocal nodes
        if k == len(order):
            return True
        p, a, b = edges[order[k]]
        floor = low[prev_same[k]] if prev_same[k] >= 0 else -1
        for u, w in pairs[phi[p]]:
            if used[u] or used[w]:
                continue
            lo = min(u, w)
            if lo <= floor:
                continue
            if twin[k] and u > w:
                continue
            nodes += 1
            if nodes > budget:
                raise _Budget
            phi[a], phi[b] = u, w
            used[u] = used[w] = True
            low[k] = lo
            if place(k + 1):
                return True
            used[u] = used[w] = False
            phi[a] = phi[b] = -1
        return False

    try:
        for r in range(m):
            nodes += 1
            phi[0] = r
            used[r] = True
            if place(0):
                return OracleResult(True, np.asarray(phi, dtype=np.int64), nodes, True)
            used[r] = False
    except _Budget:
        return OracleResult(None, None, nodes, False)
    return OracleResult(False, None, nodes, True)


class _Budget(Exception):
    pass

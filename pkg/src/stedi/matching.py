"""Near-perfect matchings in simple 3-uniform hypergraphs, and star packing
by center splitting.

Matchers accept a TripleSystem, a CrossView or an :class:`EdgeList`. They
return a :class:`Matching` whose ``edge_ids`` index the input's edge array,
plus :class:`MatchStats`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from stedi import kernels
from stedi.errors import DomainError
from stedi.hypergraph import CrossView, TripleSystem, ValidationReport
from stedi.rng import bit_generator, describe, spawn

NIBBLE_BITE = 2.0
NIBBLE_MIN_AVG_DEGREE = 2.0
NIBBLE_STALL_ROUNDS = 200


@dataclass
class EdgeList:
    """A bare hypergraph: ``(k, 3)`` edges on vertices ``0 .. n_vertices-1``."""

    edges: np.ndarray
    n_vertices: int


def as_edge_list(H):
    """Normalize to an EdgeList on compact local ids. Returns
    ``(EdgeList, vertex_ids)`` where ``vertex_ids[i]`` is the original id of
    local vertex ``i``."""
    if isinstance(H, EdgeList):
        return H, np.arange(H.n_vertices)
    if isinstance(H, TripleSystem):
        return EdgeList(H.triples, H.m), np.arange(H.m)
    if isinstance(H, CrossView):
        verts = np.sort(H.vertices())
        local = np.full(H.base.m, -1, dtype=np.int64)
        local[verts] = np.arange(len(verts))
        edges = np.ascontiguousarray(local[H.edges], dtype=np.int32)
        return EdgeList(edges, len(verts)), verts
    raise TypeError(f"cannot match on {type(H).__name__}")


@dataclass
class MatchStats:
    n_vertices: int
    n_matched: int
    leave_fraction: float
    algorithm: str
    seed: object
    rounds: int = 0

    def to_dict(self):
        return {"n_vertices": self.n_vertices, "n_matched": self.n_matched,
                "leave_fraction": self.leave_fraction, "algorithm": self.algorithm,
                "seed": describe(self.seed), "rounds": self.rounds}


@dataclass
class Matching:
    edge_ids: np.ndarray
    edges: np.ndarray  # the matched rows, in original vertex ids

    def __len__(self):
        return len(self.edge_ids)


def _stats(n, covered, algorithm, seed, rounds):
    matched = int(np.count_nonzero(covered))
    leave = 1.0 - matched / n if n else 0.0
    return MatchStats(n, matched, leave, algorithm, seed, rounds)


def _finish(el, ids, verts, covered, algorithm, seed, rounds, source_edges):
    ids = np.asarray(ids, dtype=np.int64)
    return Matching(ids, np.asarray(source_edges)[ids]), _stats(el.n_vertices, covered,
                                                                algorithm, seed, rounds)


def _source_edges(H, el):
    if isinstance(H, TripleSystem):
        return H.triples
    if isinstance(H, CrossView):
        return H.edges
    return el.edges


def random_greedy_matching(H, seed=None):
    """Accept edges greedily in a uniformly random order. The result is a
    maximal matching."""
    el, verts = as_edge_list(H)
    edges = np.ascontiguousarray(el.edges, dtype=np.int32)
    covered = np.zeros(el.n_vertices, dtype=np.uint8)
    order = np.random.Generator(bit_generator(seed)).permutation(len(edges)).astype(np.int64)
    acc = kernels.greedy_scan(edges, order, covered)
    return _finish(el, acc, verts, covered, "greedy", seed, 0, _source_edges(H, el))


def nibble_matching(H, seed=None, bite=NIBBLE_BITE, min_avg_degree=NIBBLE_MIN_AVG_DEGREE,
                    stall_rounds=NIBBLE_STALL_ROUNDS, max_rounds=10**7):
    """Semi-random matching.

    Each round marks every surviving edge independently with probability
    ``min(bite / Dbar, 1)``, where Dbar is the current average degree over
    vertices still touched by an edge, keeps marked edges that meet no
    other marked edge, and deletes edges touching newly covered vertices.
    Rounds stop when Dbar drops below ``min_avg_degree`` or the edge count
    is unchanged for ``stall_rounds`` rounds; a random greedy pass over
    the residue then makes the matching maximal.
    """
    if not bite > 0:
        raise DomainError("bite must be positive")
    el, verts = as_edge_list(H)
    edges = np.ascontiguousarray(el.edges, dtype=np.int32)
    covered = np.zeros(el.n_vertices, dtype=np.uint8)
    bg = bit_generator(seed)
    acc, alive, rounds = kernels.nibble_rounds(edges, covered, bg, float(bite),
                                               float(min_avg_degree), int(stall_rounds),
                                               int(max_rounds))
    order = np.random.Generator(bg).permutation(alive).astype(np.int64)
    rest = kernels.greedy_scan(edges, order, covered)
    ids = np.concatenate([acc, rest])
    return _finish(el, ids, verts, covered, "nibble", seed, int(rounds), _source_edges(H, el))


MATCHERS = {"greedy": random_greedy_matching, "nibble": nibble_matching}


def check_matching(H, matching):
    """Disjointness and maximality of ``matching`` in H."""
    el, _ = as_edge_list(H)
    report = ValidationReport()
    rows = el.edges[matching.edge_ids]
    counts = np.bincount(rows.ravel(), minlength=el.n_vertices)
    for v in np.flatnonzero(counts > 1):
        report.add("vertex_reused", (int(v),))
    covered = counts > 0
    free = ~covered[el.edges].any(axis=1)
    for ei in np.flatnonzero(free):
        report.add("not_maximal", (int(ei),))
    return report


@dataclass
class SplitMap:
    """Center splitting record.

    Clone ``j`` of ``X[i]`` is auxiliary vertex ``i d + j``; Y vertex
    ``Y[k]`` is auxiliary vertex ``d |X| + k``.
    """

    X: np.ndarray
    Y: np.ndarray
    d: int
    edge_group: np.ndarray    # group (clone index) of each view edge
    group_sizes: np.ndarray   # (|X|, d)

    def clones(self, v):
        i = int(np.searchsorted(self.X, v))
        if i >= len(self.X) or self.X[i] != v:
            raise DomainError(f"{v} is not a center")
        return list(range(i * self.d, (i + 1) * self.d))

    def empty_clones(self):
        return int(np.count_nonzero(self.group_sizes == 0))


def split_centers(G, d, seed=None, strict=False):
    """Replace each center by ``d`` clones and deal its edges round-robin
    over a shuffled edge order, so group sizes differ by at most one.
    Returns ``(EdgeList, SplitMap)``; auxiliary edge ``i`` comes from view
    edge ``i``."""
    if d < 1:
        raise DomainError("d must be >= 1")
    X, Y = G.X, G.Y
    deg = G.degrees[X]
    if strict and np.any(deg < d):
        raise DomainError("a center has fewer than d edges")
    xi = np.searchsorted(X, G.edges[:, 0])
    order = np.random.Generator(bit_generator(seed)).permutation(len(G.edges))
    # Rank of each edge among its center's edges in shuffled order.
    shuffled_x = xi[order]
    by_center = np.argsort(shuffled_x, kind="stable")
    start = np.zeros(len(X) + 1, dtype=np.int64)
    np.cumsum(np.bincount(shuffled_x, minlength=len(X)), out=start[1:])
    rank_sorted = np.arange(len(order)) - start[shuffled_x[by_center]]
    group = np.empty(len(G.edges), dtype=np.int64)
    group[order[by_center]] = rank_sorted % d
    sizes = np.zeros((len(X), d), dtype=np.int64)
    np.add.at(sizes, (xi, group), 1)
    yl = np.searchsorted(Y, G.edges[:, 1:])
    aux = np.empty((len(G.edges), 3), dtype=np.int32)
    aux[:, 0] = xi * d + group
    aux[:, 1:] = d * len(X) + yl
    return EdgeList(aux, d * len(X) + len(Y)), SplitMap(X, Y, d, group, sizes)


@dataclass
class StarForest:
    """Vertex-disjoint hyperstars centered in X.

    ``edges`` are view rows ``(center, y1, y2)`` grouped by center.
    """

    edges: np.ndarray
    d: int
    stars: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges, d):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 3)
        edges = edges[np.argsort(edges[:, 0], kind="stable")]
        stars = {}
        if len(edges):
            cuts = np.flatnonzero(np.diff(edges[:, 0])) + 1
            for block in np.split(edges, cuts):
                stars[int(block[0, 0])] = block
        return cls(edges, d, stars)

    @property
    def centers(self):
        return np.fromiter(self.stars.keys(), dtype=np.int64, count=len(self.stars))

    def covered(self):
        return np.concatenate([self.centers, self.edges[:, 1:].ravel()])

    def __len__(self):
        return len(self.stars)


def check_star_forest(forest, G):
    report = ValidationReport()
    covered = forest.covered()
    counts = np.bincount(covered, minlength=G.base.m) if len(covered) else np.zeros(0)
    for v in np.flatnonzero(counts > 1):
        report.add("vertex_reused", (int(v),))
    for c, block in forest.stars.items():
        if G.label[c] != 1:
            report.add("center_outside_X", (c,))
        if len(block) > forest.d:
            report.add("star_too_large", (c, len(block)))
    view_keys = {tuple(e) for e in G.edges.tolist()}
    for e in forest.edges.tolist():
        if tuple(e) not in view_keys:
            report.add("edge_not_in_view", tuple(e))
    return report


def star_packing(G, d, matcher="nibble", seed=None, strict=False, **matcher_options):
    """Pack stars of size at most ``d`` centered in ``G.X`` by matching in
    the split hypergraph and contracting clones back to their centers."""
    if matcher not in MATCHERS:
        raise DomainError(f"unknown matcher {matcher!r}")
    s_split, s_match = spawn(seed, 2)
    aux, smap = split_centers(G, d, seed=s_split, strict=strict)
    matching, stats = MATCHERS[matcher](aux, seed=s_match, **matcher_options)
    stats.seed = seed
    forest = StarForest.from_edges(G.edges[matching.edge_ids], d)
    return forest, stats

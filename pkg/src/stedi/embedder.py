"""End-to-end embedding of a hypertree T into a Steiner triple system S.

Main path: sample a verified partition, pack stars level by level between
consecutive classes, keep the part of the resulting forest hanging off the
root, lay T over it, then finish the missing edges greedily inside the
reservoir. Two shortcuts skip all of that: a hyperstar embeds at any
vertex, and when ``m > 2|V(T)|`` plain first-fit over S always succeeds.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from stedi import kernels
from stedi.config import EmbedConfig
from stedi.errors import DomainError, EmbeddingFailure, PartitionFailure
from stedi.hypergraph import ValidationReport, cross_view
from stedi.matching import StarForest, star_packing
from stedi.partition import build_plan, sample_until_valid
from stedi.rng import describe, spawn


@dataclass
class Embedding:
    phi: np.ndarray           # image of every tree vertex
    edge_images: np.ndarray   # sorted image triple of every tree edge

    @classmethod
    def from_phi(cls, T, phi):
        phi = np.asarray(phi, dtype=np.int64)
        img = np.sort(phi[T.edges], axis=1) if len(T.edges) else np.empty((0, 3), np.int64)
        return cls(phi, img)

    def to_dict(self):
        return {"phi": self.phi.tolist()}


def verify_embedding(S, T, emb):
    """Totality, injectivity, and that every tree edge lands on a triple
    of S, with distinct edges on distinct triples."""
    report = ValidationReport()
    phi = np.asarray(emb.phi, dtype=np.int64)
    if phi.shape != (T.n,):
        report.add("not_total", (len(phi), T.n), "phi has the wrong length")
        return report
    for v in np.flatnonzero((phi < 0) | (phi >= S.m)):
        report.add("not_total", (int(v),), "vertex unmapped or out of range")
    ok = (phi >= 0) & (phi < S.m)
    vals, counts = np.unique(phi[ok], return_counts=True)
    for w in vals[counts > 1]:
        pre = np.flatnonzero(phi == w)
        report.add("not_injective", tuple(int(x) for x in pre), f"all map to {int(w)}")
    seen = {}
    for i, (p, a, b) in enumerate(T.edges.tolist()):
        if not (ok[p] and ok[a] and ok[b]):
            continue
        x, y, z = int(phi[p]), int(phi[a]), int(phi[b])
        if len({x, y, z}) < 3 or S.partner_of(x, y) != z:
            report.add("edge_not_triple", (i,), f"image {x} {y} {z}")
            continue
        key = tuple(sorted((x, y, z)))
        if key in seen:
            report.add("duplicate_image", (seen[key], i))
        seen[key] = i
    return report


def _first_fit(S, T, root, allowed):
    phi = np.full(T.n, -1, dtype=np.int32)
    phi[0] = root
    allowed = allowed.astype(np.uint8)
    allowed[root] = 0
    edges = np.ascontiguousarray(T.edges[T.bfs_edges], dtype=np.int32)
    placed = kernels.first_fit_extend(S.partner, edges, phi, allowed)
    return phi, placed, len(edges)


def fast_path(S, T, mu=None):
    """``(Embedding, kind)`` for the two shortcut cases, or None when
    neither applies."""
    if T.n > S.m:
        return None
    if T.height <= 1:
        kind = "hyperstar"
    elif S.m > 2 * T.n:
        kind = "greedy"
    else:
        return None
    root = int(np.argmax(S.degrees)) if S.m else 0
    phi, placed, total = _first_fit(S, T, root, np.ones(S.m, dtype=bool))
    if placed < total:
        return None
    return Embedding.from_phi(T, phi), kind


@dataclass
class ForestState:
    """Star forests ``S_1 .. S_t`` on top of the copy of T_0.

    ``forests[i]`` packs stars of ``G_i`` (index 0 unused). ``uncovered[i]``
    is ``U_i``, the vertices of ``C_i`` missed by ``S_i``.
    """

    T0_phi: np.ndarray
    T0_ids: np.ndarray
    root_image: int
    classes: list
    forests: list
    uncovered: list
    per_level: list = field(default_factory=list)


def build_star_forests(S, partition, plan, matcher="nibble", seed=None, **matcher_options):
    t = plan.t
    forests, uncovered, per_level = [None], [None], []
    classes = partition.classes
    seeds = spawn(seed, max(t, 1))
    for i in range(1, t + 1):
        X = partition.L0_image if i == 1 else classes[i - 1]
        Y = classes[i]
        G = cross_view(S, X, Y)
        forest, stats = star_packing(G, max(plan.d[i], 1), matcher=matcher, seed=seeds[i - 1],
                                     **matcher_options)
        hit = np.zeros(S.m, dtype=bool)
        hit[forest.covered()] = True
        U = Y[~hit[Y]]
        forests.append(forest)
        uncovered.append(U)
        n_i = len(X) + len(Y)
        per_level.append({"level": i, "N_i": int(n_i), "U_i": int(len(U)),
                          "leave_fraction": float(1 - np.count_nonzero(hit) / n_i) if n_i else 0.0,
                          "U_over_C": float(len(U) / len(Y)) if len(Y) else 0.0,
                          "stars": len(forest), "star_edges": int(len(forest.edges)),
                          "view_edges": int(len(G)), "match": stats.to_dict()})
    root = int(partition.T0_phi[0])
    return ForestState(partition.T0_phi, plan.dec.T0_ids, root, classes, forests, uncovered,
                       per_level)


@dataclass
class PruneResult:
    vertices: np.ndarray      # S-vertices of T_1
    n_edges: int
    V_F: int
    orphan_counts: list       # |U_i| per level 1..t
    discarded: list           # vertices discarded below orphans of level i


def prune_to_T1(forest, plan):
    """Root component ``T_1`` of ``F = T_0 + S_1 + ... + S_t``.

    ``V(F)`` is the T_0 copy plus all of ``C_1 .. C_t``. A vertex of
    ``C_i`` has a parent when some star of ``S_i`` covers it; vertices of
    ``U_i`` are orphans and everything below them is discarded.
    """
    t = plan.t
    T0_vertices = forest.T0_phi.astype(np.int64)
    V_F = len(T0_vertices) + sum(len(c) for c in forest.classes[1:])
    keep = list(T0_vertices)
    frontier = np.asarray(_last_level(forest, plan), dtype=np.int64)
    discarded = []
    for i in range(1, t + 1):
        f = forest.forests[i]
        if len(f.edges):
            inside = np.isin(f.edges[:, 0], frontier)
            nxt = f.edges[inside, 1:].ravel()
        else:
            nxt = np.empty(0, dtype=np.int64)
        keep.extend(nxt.tolist())
        frontier = nxt
    # Subtree sizes of orphans, bottom-up over levels.
    for i in range(1, t + 1):
        size = {int(v): 1 for v in forest.classes[i]}
        discarded.append(size)
    for i in range(t, 1, -1):
        f = forest.forests[i]
        for c, block in f.stars.items():
            sub = sum(discarded[i - 1][int(y)] for y in block[:, 1:].ravel())
            discarded[i - 2][c] = discarded[i - 2].get(c, 1) + sub
    orphan_sub = [int(sum(discarded[i - 1][int(u)] for u in forest.uncovered[i])) for i in range(1, t + 1)]
    verts = np.asarray(keep, dtype=np.int64)
    return PruneResult(verts, (len(verts) - 1) // 2, V_F,
                       [int(len(forest.uncovered[i])) for i in range(1, t + 1)], orphan_sub)


def _last_level(forest, plan):
    dec = plan.dec
    last = np.flatnonzero(dec.T0.level == dec.i0)
    return forest.T0_phi[last]


def align(T, plan, forest):
    """Lay T over the forest: a T-vertex at level ``i0 + k`` mapped to
    ``x`` sends its j-th child edge to the j-th edge of the star at ``x``
    in ``S_(k+1)``. Returns the partial image and the ids of T-edges left
    for the reservoir, in an order where every parent is placed first."""
    dec = plan.dec
    phi = np.full(T.n, -1, dtype=np.int32)
    phi[dec.T0_ids] = forest.T0_phi
    for k in range(plan.t):
        stars = forest.forests[k + 1].stars
        for v in dec.L[k]:
            x = int(phi[v])
            if x < 0 or x not in stars:
                continue
            block = stars[x]
            for j, ei in enumerate(T.children_of(v)[:len(block)]):
                _, a, b = T.edges[ei]
                phi[a] = block[j, 1]
                phi[b] = block[j, 2]
    order = T.bfs_edges
    missing = order[phi[T.edges[order, 1]] < 0]
    return phi, missing


def reservoir_complete(S, T, phi, missing, R_mask):
    """Place each missing edge at the first free pair of its parent's image
    inside the remaining reservoir. Returns ``(phi, placed)``; ``placed <
    len(missing)`` means the reservoir ran dry at that step."""
    phi = np.ascontiguousarray(phi, dtype=np.int32).copy()
    allowed = np.ascontiguousarray(R_mask, dtype=np.uint8).copy()
    edges = np.ascontiguousarray(T.edges[missing], dtype=np.int32)
    placed = kernels.first_fit_extend(S.partner, edges, phi, allowed)
    return phi, int(placed)


@dataclass
class PipelineTrace:
    n: int
    m: int
    d: int
    mu: float
    mode: str
    seed: object
    outcome: str = "pending"
    path: str = ""
    precondition_met: bool = True
    attempts: list = field(default_factory=list)
    stage_sizes: dict = field(default_factory=dict)
    per_level: list = field(default_factory=list)
    timings_ms: dict = field(default_factory=dict)
    failure: dict | None = None
    plan: dict | None = None
    partition: dict | None = None

    def to_dict(self, timings=True):
        out = {"n": self.n, "m": self.m, "d": self.d, "mu": self.mu, "mode": self.mode,
               "seed": describe(self.seed), "outcome": self.outcome, "path": self.path,
               "precondition_met": self.precondition_met, "stage_sizes": self.stage_sizes,
               "per_level": self.per_level, "attempts": self.attempts, "failure": self.failure,
               "plan": self.plan, "partition": self.partition}
        if timings:
            out["timings_ms"] = self.timings_ms
        return out


class _Clock:
    def __init__(self, sink):
        self.sink = sink

    def __call__(self, name):
        clock = self

        class _Span:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                ms = (time.perf_counter() - self.t) * 1000
                clock.sink[name] = round(clock.sink.get(name, 0.0) + ms, 3)

        return _Span()


def _attempt(S, T, config, plan, seed, trace, clock):
    """One pass of the main pipeline. Returns phi or raises EmbeddingFailure."""
    s_part, s_forest = spawn(seed, 2)
    with clock("partition"):
        try:
            part, report = sample_until_valid(S, T, config, plan=plan, seed=s_part)
        except PartitionFailure as exc:
            raise EmbeddingFailure(str(exc), "partition") from exc
    trace.partition = {"sizes": part.sizes, "report": report.to_dict()}
    if part.T0_phi is None:
        raise EmbeddingFailure("top of the tree does not embed in C0", "partition")
    with clock("star_forests"):
        forest = build_star_forests(S, part, plan, matcher=config.matcher, seed=s_forest,
                                    **({"bite": config.bite, "stall_rounds": config.stall_rounds}
                                       if config.matcher == "nibble" else {}))
    trace.per_level = forest.per_level
    with clock("prune"):
        pr = prune_to_T1(forest, plan)
        phi, missing = align(T, plan, forest)
    R = part.labels == plan.t + 1
    sizes = {"V_F": pr.V_F, "V_T1": int(len(pr.vertices)), "E_T1": pr.n_edges,
             "E_T1_aligned": int(T.n_edges - len(missing)), "reservoir_used": int(len(missing)),
             "R": int(R.sum()), "orphans": pr.orphan_counts, "orphan_subtrees": pr.discarded}
    trace.stage_sizes = sizes
    if R.sum() < 2 * len(missing):
        raise EmbeddingFailure(f"reservoir has {int(R.sum())} vertices, need {2 * len(missing)}",
                               "reservoir")
    with clock("reservoir"):
        phi, placed = reservoir_complete(S, T, phi, missing, R)
    if placed < len(missing):
        raise EmbeddingFailure(f"reservoir exhausted at step {placed + 1} of {len(missing)}",
                               "reservoir")
    return phi


def embed(S, T, config=None, seed=None):
    """Embed T into S. Returns ``(Embedding, PipelineTrace)``; raises
    EmbeddingFailure carrying the trace when every retry fails."""
    config = config or EmbedConfig()
    seed = config.seed if seed is None else seed
    d = int(T.forward_degree.max()) if T.n_edges else 0
    trace = PipelineTrace(n=T.n, m=S.m, d=d, mu=config.mu, mode=config.mode, seed=seed)
    clock = _Clock(trace.timings_ms)
    trace.precondition_met = S.m >= (1 + config.mu) * T.n
    if T.n > S.m:
        trace.outcome = "failure"
        trace.failure = {"stage": "precondition", "message": "pigeonhole: |V(T)| > |V(S)|"}
        raise EmbeddingFailure("pigeonhole: |V(T)| > |V(S)|", "precondition", trace)
    if not trace.precondition_met and config.mode == "paper_strict":
        trace.outcome = "failure"
        trace.failure = {"stage": "precondition", "message": "m < (1 + mu) |V(T)|"}
        raise EmbeddingFailure("m < (1 + mu) |V(T)|", "precondition", trace)

    if config.fast_paths:
        with clock("fast_path"):
            fp = fast_path(S, T, config.mu)
        if fp is not None:
            emb, kind = fp
            return _certify(S, T, emb, trace, f"fast_{kind}")

    trace.path = "main"
    try:
        with clock("plan"):
            plan = build_plan(config, S, T)
    except DomainError as exc:
        trace.outcome = "failure"
        trace.failure = {"stage": "plan", "message": str(exc)}
        raise EmbeddingFailure(str(exc), "plan", trace) from exc
    trace.plan = plan.to_dict()
    last = None
    for k, s in enumerate(spawn(seed, config.max_pipeline_retries)):
        try:
            phi = _attempt(S, T, config, plan, s, trace, clock)
        except EmbeddingFailure as exc:
            trace.attempts.append({"attempt": k, "stage": exc.stage, "message": str(exc)})
            last = exc
            continue
        trace.attempts.append({"attempt": k, "stage": "done"})
        return _certify(S, T, Embedding.from_phi(T, phi), trace, "main")
    trace.outcome = "failure"
    trace.failure = {"stage": last.stage, "message": str(last)}
    raise EmbeddingFailure(f"all {config.max_pipeline_retries} attempts failed; last: {last}",
                           last.stage, trace)


def _certify(S, T, emb, trace, path):
    trace.path = path
    report = verify_embedding(S, T, emb)
    if not report.valid:  # pragma: no cover - would be a bug in a stage
        trace.outcome = "failure"
        trace.failure = {"stage": "verify", "message": str(dict(report.counts))}
        raise EmbeddingFailure(f"certification failed: {dict(report.counts)}", "verify", trace)
    trace.outcome = "success"
    return emb, trace

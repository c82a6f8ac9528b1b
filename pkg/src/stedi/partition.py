"""Random vertex partitions ``C_0, ..., C_t, R`` and their verification.

The plan fixes class probabilities: ``p_i = l_i / m`` for the tree levels,
``p_0`` for the class hosting the top of the tree, and whatever is left,
``gamma``, for the reservoir R. A sampled partition is accepted once it
passes properties (a) to (e):

(a) ``|C_i|`` close to ``l_i``;
(b) centers in ``C_(i-1)`` have about ``d p_i l_(i-1)`` triples into ``C_i``;
(c) vertices of ``C_i`` have about ``p_i l_(i-1)`` triples back to ``C_(i-1)``;
(d) every vertex keeps at least ``rho m`` triples inside R;
(e) ``|C_0|`` close to ``p_0 m``, the top tree embeds in ``C_0`` and the
    vertices of ``C_1`` see the right number of triples from the image of
    the top tree's last level.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from stedi import kernels
from stedi.config import PROPERTIES, EmbedConfig, band
from stedi.errors import DomainError, PartitionFailure
from stedi.hypergraph import count_low_degree, cross_view
from stedi.hypertree import decompose_levels
from stedi.rng import generator, spawn


@dataclass
class PartitionPlan:
    m: int
    n: int
    d: list          # d[i] = forward degree used for level i, i in 1..t (d[0] unused)
    t: int
    p: list          # p_0 .. p_t
    gamma: float
    rho_eff: float
    dec: object      # LevelDecomposition
    constants: object

    @property
    def ell(self):
        return self.dec.ell

    def to_dict(self):
        return {"m": self.m, "n": self.n, "d": self.d, "t": self.t, "p": self.p,
                "gamma": self.gamma, "rho_eff": self.rho_eff, "i0": self.dec.i0,
                "ell": self.dec.ell}


def plan_probabilities(m, ell, p0):
    """``[p_0, ..., p_t]`` and ``gamma`` for level sizes ``ell = [l_0, ..., l_t]``.
    Raises DomainError when the reservoir probability is not positive."""
    p = [float(p0)] + [ell_i / m for ell_i in ell[1:]]
    gamma = 1.0 - sum(p)
    if gamma <= 1e-12:
        raise DomainError(f"reservoir vanished: gamma = {gamma:.6g}")
    if not all(0 < x < 1 for x in p):
        raise DomainError(f"class probabilities outside (0, 1): {p}")
    return p, gamma


def decomposition_n(m, T, mu):
    """Vertex budget ``n`` for the level split: ``floor(m / (1 + mu))``, but
    never below ``|V(T)|``."""
    return max(T.n, int(m // (1 + mu)))


def level_degrees(T, dec):
    """Forward degree per level: the largest one among ``L_(i-1)``."""
    fd = T.forward_degree
    return [0] + [int(fd[dec.L[i - 1]].max()) if len(dec.L[i - 1]) else 0
                  for i in range(1, dec.t + 1)]


def build_plan(config, S, T):
    c = config.constants()
    m = S.m
    n = decomposition_n(m, T, config.mu)
    dec = decompose_levels(T, c.eps, n)
    if config.mode == "paper_strict":
        p0 = 4 * math.sqrt(c.eps)
    elif config.p0 is not None:
        p0 = config.p0
    else:
        # Smallest p_0 with (m - 1) p_0^2 / 4 >= |V(T_0)|, capped at 4 sqrt(eps).
        p0 = min(4 * math.sqrt(c.eps), 2 * math.sqrt(dec.T0.n / (m - 1)))
    p, gamma = plan_probabilities(m, dec.ell, p0)
    if config.mode == "paper_strict":
        rho_eff = c.rho
    else:
        # Expected reservoir degree is (m - 1) gamma^2 / 2; never demand
        # more than half of it.
        rho_eff = min(c.rho, gamma * gamma / 4)
    return PartitionPlan(m=m, n=n, d=level_degrees(T, dec), t=dec.t, p=p, gamma=gamma,
                         rho_eff=rho_eff, dec=dec, constants=c)


@dataclass
class Partition:
    """``labels[v]`` is ``i`` for ``v`` in ``C_i`` and ``t + 1`` for R."""

    labels: np.ndarray
    t: int
    T0_phi: np.ndarray | None = None   # image of each T_0 vertex
    L0_image: np.ndarray | None = None

    def cls(self, i):
        return np.flatnonzero(self.labels == i)

    @property
    def classes(self):
        return [self.cls(i) for i in range(self.t + 1)]

    @property
    def R(self):
        return self.cls(self.t + 1)

    def mask(self, i):
        return self.labels == i

    @property
    def sizes(self):
        return np.bincount(self.labels, minlength=self.t + 2).tolist()


def sample_partition(plan, S, seed=None):
    """Each vertex lands in ``C_i`` with probability ``p_i`` and in R with
    probability ``gamma``, independently."""
    cum = np.cumsum(plan.p)
    u = generator(seed).random(S.m)
    labels = np.searchsorted(cum, u, side="right").astype(np.int16)
    return Partition(labels=labels, t=plan.t)


def embed_T0_greedy(S, C0, T0, root=None):
    """Embed the hypertree ``T0`` inside ``S[C0]``: breadth-first over T0's
    edges, taking for each the first free pair at the parent's image.
    The root goes to ``root`` or to the vertex of highest degree in
    ``S[C0]``. Returns the image array, or None on failure."""
    in_c0 = np.zeros(S.m, dtype=bool)
    in_c0[np.asarray(C0, dtype=np.int64)] = True
    if not in_c0.any():
        return None
    if root is None:
        inside = in_c0[S.triples].all(axis=1)
        deg = np.bincount(S.triples[inside].ravel(), minlength=S.m)
        deg = np.where(in_c0, deg, -1)
        root = int(np.argmax(deg))
    elif not in_c0[root]:
        raise DomainError("root must lie in C0")
    phi = np.full(T0.n, -1, dtype=np.int32)
    phi[0] = root
    allowed = in_c0.astype(np.uint8)
    allowed[root] = 0
    edges = np.ascontiguousarray(T0.edges[T0.bfs_edges], dtype=np.int32)
    placed = kernels.first_fit_extend(S.partner, edges, phi, allowed)
    return phi if placed == len(edges) else None


@dataclass
class PropertyResult:
    name: str
    enabled: bool = True
    passed: bool = True
    checked: int = 0
    failures: int = 0
    witnesses: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def fail(self, witness, limit=10):
        self.passed = False
        self.failures += 1
        if len(self.witnesses) < limit:
            self.witnesses.append(witness)

    def to_dict(self):
        return {"enabled": self.enabled, "passed": self.passed, "checked": self.checked,
                "failures": self.failures, "witnesses": self.witnesses, "detail": self.detail}


@dataclass
class PartitionReport:
    results: dict
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.results.values() if r.enabled)

    def failed(self):
        return [k for k, r in self.results.items() if r.enabled and not r.passed]

    def __getitem__(self, key):
        return self.results[key]

    def to_dict(self):
        return {"passed": self.passed, "properties": {k: r.to_dict() for k, r in self.results.items()},
                "notes": self.notes}


def _range_check(res, values, ids, lo, hi):
    res.checked += len(values)
    bad = np.flatnonzero((values < lo) | (values > hi))
    res.failures += len(bad)
    if len(bad):
        res.passed = False
        worst = bad[np.argsort(-np.abs(values[bad] - (lo + hi) / 2))][:10]
        res.witnesses.extend({"vertex": int(ids[k]), "value": int(values[k])} for k in worst)


def reservoir_degrees(S, R_mask):
    """``d_{S[v + R]}(v)`` for every vertex: triples through v whose other
    two vertices both lie in R."""
    inr = R_mask[S.triples]
    deg = np.zeros(S.m, dtype=np.int64)
    for j in range(3):
        a, b = [k for k in range(3) if k != j]
        sel = inr[:, a] & inr[:, b]
        deg += np.bincount(S.triples[sel, j], minlength=S.m)
    return deg


def verify_properties(S, partition, plan, config):
    """Check (a) to (e) with the configured tolerances.

    Property (b) is checked for levels ``2 .. t``; the level-1 centers are
    the image of ``L_0``, which (e) covers. Widths are ``tol K sqrt(x
    max(ln x, 1))``. In practical mode the (e) band for ``C_1`` is the
    wider of ``eps^0.1 x`` and that width, and the cap ``2x`` gains the same
    width.
    """
    c = plan.constants
    K = c.K
    tol = config.tolerances
    on = config.checks
    strict = config.mode == "paper_strict"
    res = {p: PropertyResult(p, enabled=on[p]) for p in PROPERTIES}
    ell, p, t, m = plan.ell, plan.p, plan.t, plan.m
    labels = partition.labels
    sizes = partition.sizes
    notes = ["(b) checked for levels 2..t; level-1 centers (image of L0) are covered by (e)"]

    if on["a"]:
        for i in range(1, t + 1):
            w = band(ell[i], K, tol["a"])
            res["a"].checked += 1
            if abs(sizes[i] - ell[i]) > w:
                res["a"].fail({"level": i, "size": sizes[i], "target": ell[i], "band": w})

    if (on["b"] or on["c"]) and t >= 2:
        for i in range(2, t + 1):
            G = cross_view(S, partition.mask(i - 1), partition.mask(i))
            x = p[i] * ell[i - 1]
            d_eff = ell[i] / (2 * ell[i - 1])
            if on["b"]:
                X = G.X
                w = d_eff * band(x, K, tol["b"])
                _range_check(res["b"], G.degrees[X], X, d_eff * x - w, d_eff * x + w)
            if on["c"]:
                Y = G.Y
                w = band(x, K, tol["c"])
                _range_check(res["c"], G.degrees[Y], Y, x - w, x + w)

    if on["d"]:
        deg = reservoir_degrees(S, labels == t + 1)
        thr = plan.rho_eff * m
        res["d"].detail = {"threshold": thr, "min_degree": int(deg.min()) if m else 0}
        _range_check(res["d"], deg, np.arange(m), thr, np.inf)

    if on["e"]:
        e = res["e"]
        x0 = p[0] * m
        w0 = band(x0, K, tol["e"])
        e.checked += 1
        if abs(sizes[0] - x0) > w0:
            e.fail({"what": "C0 size", "size": sizes[0], "target": x0, "band": w0})
        e.checked += 1
        if partition.T0_phi is None:
            e.fail({"what": "T0 not embedded in C0"})
        elif t >= 1:
            x = p[1] * ell[0]
            frac = config.e_exception_frac
            if frac is None:
                frac = c.eps ** 0.1
            if strict:
                half, cap = c.eps ** 0.1 * x, 2 * x
            else:
                half = max(c.eps ** 0.1 * x, band(x, K, tol["e"]))
                cap = 2 * x + band(x, K, tol["e"])
            G = cross_view(S, partition.L0_image, partition.mask(1))
            Y = G.Y
            deg = G.degrees[Y]
            off = np.count_nonzero(np.abs(deg - x) > half)
            allowed = frac * len(Y)
            e.checked += len(Y)
            e.detail = {"target": x, "half_width": half, "cap": cap, "off_band": int(off),
                        "allowed_off_band": allowed}
            if off > allowed:
                e.fail({"what": "C1 degrees off band", "count": int(off), "allowed": allowed})
            over = np.flatnonzero(deg > cap)
            for k in over[:10]:
                e.fail({"what": "C1 degree above cap", "vertex": int(Y[k]), "value": int(deg[k])})
            e.failures += max(len(over) - 10, 0)
            # Deterministic counting bound on the complement of C0.
            alpha = c.eps ** 0.2
            C0 = partition.cls(0)
            low = count_low_degree(S, partition.L0_image, C0, alpha)
            e.detail["low_degree_count"] = low
            e.detail["low_degree_bound"] = len(C0) / alpha
            if low > len(C0) / alpha:  # pragma: no cover - impossible for an STS
                e.fail({"what": "counting bound violated", "count": low})
    return PartitionReport(res, notes)


def attach_T0(S, partition, plan):
    """Embed ``T_0`` in ``C_0`` and record the image of ``L_0``."""
    dec = plan.dec
    phi = embed_T0_greedy(S, partition.cls(0), dec.T0)
    partition.T0_phi = phi
    if phi is not None:
        # T0 is relabeled breadth-first; its last level is the tail.
        last = np.flatnonzero(dec.T0.level == dec.i0)
        partition.L0_image = phi[last].astype(np.int64)
    return partition


def sample_until_valid(S, T, config, plan=None, seed=None):
    """Resample until every enabled property holds. Raises PartitionFailure
    with a per-property failure histogram when the budget runs out."""
    if plan is None:
        plan = build_plan(config, S, T)
    seeds = spawn(config.seed if seed is None else seed, config.max_resamples)
    hist = Counter()
    report = None
    for attempt, s in enumerate(seeds, start=1):
        part = attach_T0(S, sample_partition(plan, S, s), plan)
        report = verify_properties(S, part, plan, config)
        if report.passed:
            report.notes.append(f"accepted on attempt {attempt}")
            return part, report
        hist.update(report.failed())
    raise PartitionFailure(f"no valid partition in {config.max_resamples} samples: {dict(hist)}",
                           histogram=hist, attempts=config.max_resamples, last_report=report)


__all__ = ["PartitionPlan", "Partition", "PartitionReport", "PropertyResult", "EmbedConfig",
           "plan_probabilities", "build_plan", "sample_partition", "embed_T0_greedy",
           "verify_properties", "sample_until_valid", "reservoir_degrees", "attach_T0",
           "decomposition_n", "level_degrees"]

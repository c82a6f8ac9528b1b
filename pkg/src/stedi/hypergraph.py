"""Simple 3-uniform hypergraphs, Steiner triple systems and cross views.

A :class:`TripleSystem` is immutable. Triples are stored as an ``(k, 3)``
int32 array, each row sorted ascending and rows in lexicographic order. The
pair index ``(u, v) -> w`` is a dense ``m x m`` matrix built on first use.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from stedi.errors import DomainError

# Dense pair matrices above this order would not fit in memory at desk scale.
DENSE_PAIR_LIMIT = 20_000


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    """Collects every violation found instead of stopping at the first.

    ``counts`` always holds exact totals per kind; ``violations`` lists at
    most ``max_listed`` entries per kind.
    """

    violations: list = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)
    max_listed: int = 1000

    def add(self, kind, where, detail=""):
        if self.counts[kind] < self.max_listed:
            self.violations.append(Violation(kind, tuple(where), detail))
        self.counts[kind] += 1

    def add_many(self, kind, wheres, total=None):
        wheres = list(wheres)
        if not wheres and not total:
            return
        room = max(self.max_listed - self.counts[kind], 0)
        self.violations.extend(Violation(kind, tuple(w)) for w in wheres[:room])
        self.counts[kind] += len(wheres) if total is None else total

    @property
    def valid(self):
        return sum(self.counts.values()) == 0

    def __bool__(self):
        return self.valid

    def of_kind(self, kind):
        return [v for v in self.violations if v.kind == kind]

    def to_dict(self):
        return {
            "valid": self.valid,
            "counts": dict(self.counts),
            "violations": [
                {"kind": v.kind, "where": [int(x) for x in v.where], "detail": v.detail}
                for v in self.violations
            ],
        }


def _as_index_array(vertices, m, name):
    arr = np.asarray(vertices)
    if arr.dtype == bool:
        if arr.shape != (m,):
            raise DomainError(f"{name} mask must have length {m}")
        return np.flatnonzero(arr)
    arr = np.asarray(sorted(set(int(v) for v in np.ravel(arr))), dtype=np.int64)
    if len(arr) and (arr[0] < 0 or arr[-1] >= m):
        raise DomainError(f"{name} contains a vertex outside [0, {m})")
    return arr


class TripleSystem:
    """A 3-uniform hypergraph on vertices ``0 .. m-1``.

    Construction checks that every triple has three distinct in-range
    vertices. It does not check simplicity; use :func:`validate_simple`.
    """

    def __init__(self, m, triples, *, is_sts=None, partner=None):
        if m < 0:
            raise DomainError("vertex count must be nonnegative")
        arr = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        if len(arr):
            if arr.min() < 0 or arr.max() >= m:
                raise DomainError(f"triple vertex outside [0, {m})")
            arr = np.sort(arr, axis=1)
            if np.any(arr[:, 0] == arr[:, 1]) or np.any(arr[:, 1] == arr[:, 2]):
                raise DomainError("triple with a repeated vertex")
            arr = arr[np.lexsort((arr[:, 2], arr[:, 1], arr[:, 0]))]
        tri = np.ascontiguousarray(arr, dtype=np.int32)
        tri.flags.writeable = False
        self.m = int(m)
        self.triples = tri
        self._is_sts = is_sts
        if partner is not None:
            partner.flags.writeable = False
        self._partner = partner

    def __repr__(self):
        return f"TripleSystem(m={self.m}, triples={len(self.triples)})"

    def __len__(self):
        return len(self.triples)

    def __eq__(self, other):
        if not isinstance(other, TripleSystem):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.triples, other.triples)

    __hash__ = None

    @property
    def is_sts(self):
        if self._is_sts is None:
            self._is_sts = validate_sts(self).valid
        return self._is_sts

    @cached_property
    def degrees(self):
        deg = np.bincount(self.triples.ravel(), minlength=self.m)
        deg.flags.writeable = False
        return deg

    def degree(self, v):
        return int(self.degrees[v])

    @property
    def partner(self):
        """Dense pair index: ``partner[u, v]`` is the third vertex of the
        triple through ``u, v``, or -1."""
        if self._partner is None:
            if self.m > DENSE_PAIR_LIMIT:
                raise DomainError(f"dense pair index unavailable for m > {DENSE_PAIR_LIMIT}")
            p = np.full((self.m, self.m), -1, dtype=np.int32)
            t = self.triples[::-1]  # first occurrence wins on non-simple input
            a, b, c = t[:, 0], t[:, 1], t[:, 2]
            p[a, b] = c
            p[b, a] = c
            p[a, c] = b
            p[c, a] = b
            p[b, c] = a
            p[c, b] = a
            p.flags.writeable = False
            self._partner = p
        return self._partner

    @cached_property
    def _pair_keys(self):
        t = self.triples.astype(np.int64)
        m = self.m
        keys = np.concatenate([t[:, 0] * m + t[:, 1], t[:, 0] * m + t[:, 2], t[:, 1] * m + t[:, 2]])
        third = np.concatenate([t[:, 2], t[:, 1], t[:, 0]])
        order = np.argsort(keys, kind="stable")
        return keys[order], third[order]

    def partner_of(self, u, v):
        if self.m <= DENSE_PAIR_LIMIT:
            w = int(self.partner[u, v])
            return None if w < 0 else w
        keys, third = self._pair_keys
        key = min(u, v) * self.m + max(u, v)
        i = np.searchsorted(keys, key)
        if i < len(keys) and keys[i] == key:
            return int(third[i])
        return None

    @cached_property
    def incidence(self):
        """CSR incidence ``(indptr, triple_ids)``; triples at ``v`` are
        ``triple_ids[indptr[v]:indptr[v+1]]`` in triple order."""
        flat = self.triples.ravel()
        order = np.argsort(flat, kind="stable")
        ids = (order // 3).astype(np.int64)
        indptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(np.bincount(flat, minlength=self.m), out=indptr[1:])
        return indptr, ids

    def triples_at(self, v):
        indptr, ids = self.incidence
        return self.triples[ids[indptr[v]:indptr[v + 1]]]


def validate_simple(sys):
    """Report every pair covered by two or more triples."""
    report = ValidationReport()
    if len(sys.triples) == 0:
        return report
    keys, _ = sys._pair_keys
    uniq, counts = np.unique(keys, return_counts=True)
    dup = uniq[counts > 1]
    report.add_many("pair_multiply_covered",
                    ((int(k // sys.m), int(k % sys.m)) for k in dup[:report.max_listed]),
                    total=len(dup))
    return report


def validate_sts(sys):
    """Every pair of distinct vertices must lie in exactly one triple."""
    report = validate_simple(sys)
    m = sys.m
    expected = m * (m - 1) // 2
    keys = np.unique(sys._pair_keys[0]) if len(sys.triples) else np.empty(0, dtype=np.int64)
    missing = expected - len(keys)
    if missing:
        covered = np.zeros((m, m), dtype=bool) if m <= DENSE_PAIR_LIMIT else None
        listed = []
        if covered is not None:
            covered[keys // m, keys % m] = True
            iu, ju = np.triu_indices(m, 1)
            holes = np.flatnonzero(~covered[iu, ju])[:report.max_listed]
            listed = [(int(iu[h]), int(ju[h])) for h in holes]
        report.add_many("pair_uncovered", listed, total=missing)
    if len(sys.triples) != m * (m - 1) // 6 or m * (m - 1) % 6:
        report.add("triple_count", (len(sys.triples), m * (m - 1) // 6))
    return report


def pair_partner(sys, u, v):
    """The unique ``w`` with ``{u, v, w}`` a triple, or None if uncovered."""
    if u == v:
        raise DomainError("pair_partner needs two distinct vertices")
    if not (0 <= u < sys.m and 0 <= v < sys.m):
        raise DomainError("vertex out of range")
    return sys.partner_of(int(u), int(v))


class CrossView:
    """Edges of ``sys`` with exactly one vertex in X and two in Y.

    ``edges`` rows are ``(center, y1, y2)`` with the X-vertex first and
    ``y1 < y2``, listed in the base system's triple order.
    """

    def __init__(self, base, X, Y):
        m = base.m
        xs = _as_index_array(X, m, "X")
        ys = _as_index_array(Y, m, "Y")
        label = np.zeros(m, dtype=np.int8)
        label[xs] = 1
        if np.any(label[ys] == 1):
            raise DomainError("X and Y must be disjoint")
        label[ys] = 4
        self.base = base
        self.X = xs
        self.Y = ys
        self.label = label
        label.flags.writeable = False
        if len(xs) == 0 or len(ys) < 2 or len(base.triples) == 0:
            edges = np.empty((0, 3), dtype=np.int32)
        else:
            lab = label[base.triples]
            # 1 + 4 + 4 is the only way to reach 9 with labels in {0, 1, 4}
            keep = lab.sum(axis=1, dtype=np.int8) == 9
            sel = base.triples[keep]
            lab = lab[keep]
            ci = np.argmax(lab == 1, axis=1)
            rows = np.arange(len(sel))
            center = sel[rows, ci]
            rest = np.where(lab == 4)[1].reshape(-1, 2)
            y1 = sel[rows, rest[:, 0]]
            y2 = sel[rows, rest[:, 1]]
            edges = np.stack([center, y1, y2], axis=1).astype(np.int32)
        edges.flags.writeable = False
        self.edges = edges

    @property
    def n_vertices(self):
        return len(self.X) + len(self.Y)

    @property
    def centers(self):
        return self.edges[:, 0]

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return (tuple(int(v) for v in e) for e in self.edges)

    @cached_property
    def degrees(self):
        """Length-m array; zero outside X and Y."""
        deg = np.bincount(self.edges.ravel(), minlength=self.base.m)
        deg.flags.writeable = False
        return deg

    def degree(self, v):
        return int(self.degrees[v])

    def vertices(self):
        return np.concatenate([self.X, self.Y])


def cross_view(sys, X, Y):
    return CrossView(sys, X, Y)


def count_low_degree(sys, L0, C, alpha):
    """Vertices ``v`` outside C with fewer than ``(1 - alpha)|L0|`` triples
    ``{v, x, w}``, ``x`` in L0 and ``w`` outside C. Requires L0 inside C.

    For an STS the count never exceeds ``|C| / alpha``.
    """
    m = sys.m
    in_c = np.zeros(m, dtype=bool)
    in_c[_as_index_array(C, m, "C")] = True
    l0 = _as_index_array(L0, m, "L0")
    if not in_c[l0].all():
        raise DomainError("L0 must be a subset of C")
    outside = np.flatnonzero(~in_c)
    view = CrossView(sys, l0, outside)
    deg = view.degrees[outside]
    return int(np.count_nonzero(deg < (1 - alpha) * len(l0)))

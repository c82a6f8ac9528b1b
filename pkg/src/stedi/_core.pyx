# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.

Every routine here has a line-for-line twin in ``_fallback.py``. Both draw
from the same numpy BitGenerator stream (raw 64-bit outputs), so for a fixed
seed the two backends return identical results.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int32_t, int64_t, uint8_t
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t

cnp.import_array()

cdef double _TWO_M53 = 1.0 / 9007199254740992.0


cdef bitgen_t* _bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline uint64_t _raw(bitgen_t* rng) noexcept nogil:
    return rng.next_uint64(rng.state)


# -- hill climbing -----------------------------------------------------------

cdef inline void _drop_live(int32_t[:, ::1] live, int32_t[:, ::1] pos, int32_t[::1] cnt,
                            int32_t[::1] lp, int32_t[::1] lpos, int* nlp,
                            int x, int y) noexcept nogil:
    cdef int i = pos[x, y]
    cdef int last = live[x, cnt[x] - 1]
    cdef int j, u
    live[x, i] = last
    pos[x, last] = i
    cnt[x] -= 1
    if cnt[x] == 0:
        j = lpos[x]
        u = lp[nlp[0] - 1]
        lp[j] = u
        lpos[u] = j
        nlp[0] -= 1


cdef inline void _add_live(int32_t[:, ::1] live, int32_t[:, ::1] pos, int32_t[::1] cnt,
                           int32_t[::1] lp, int32_t[::1] lpos, int* nlp,
                           int x, int y) noexcept nogil:
    if cnt[x] == 0:
        lp[nlp[0]] = x
        lpos[x] = nlp[0]
        nlp[0] += 1
    live[x, cnt[x]] = y
    pos[x, y] = cnt[x]
    cnt[x] += 1


def hill_climb_sts(int n, object bit_generator, int64_t max_iters):
    """Stinson hill climbing. Returns (triples, partner, iterations); the
    first two are None when the iteration budget runs out."""
    cdef bitgen_t* rng = _bitgen(bit_generator)
    cdef int64_t target = <int64_t> n * (n - 1) // 6
    cdef int64_t ntrip = 0, it = 0
    cdef int x, y, z, w, c, i, j, nlp = n
    cdef uint64_t r0, r1, r2

    other_a = np.full((n, n), -1, dtype=np.int32)
    live_a = np.empty((n, n), dtype=np.int32)
    pos_a = np.empty((n, n), dtype=np.int32)
    cnt_a = np.full(n, n - 1, dtype=np.int32)
    lp_a = np.arange(n, dtype=np.int32)
    lpos_a = np.arange(n, dtype=np.int32)
    cdef int32_t[:, ::1] other = other_a
    cdef int32_t[:, ::1] live = live_a
    cdef int32_t[:, ::1] pos = pos_a
    cdef int32_t[::1] cnt = cnt_a
    cdef int32_t[::1] lp = lp_a
    cdef int32_t[::1] lpos = lpos_a

    for x in range(n):
        j = 0
        for y in range(n):
            if y != x:
                live[x, j] = y
                pos[x, y] = j
                j += 1
    if n < 3:
        nlp = 0

    with bit_generator.lock:
        with nogil:
            while ntrip < target and it < max_iters:
                it += 1
                r0 = _raw(rng)
                r1 = _raw(rng)
                r2 = _raw(rng)
                x = lp[r0 % <uint64_t> nlp]
                c = cnt[x]
                i = <int> (r1 % <uint64_t> c)
                j = <int> (r2 % <uint64_t> (c - 1))
                if j >= i:
                    j += 1
                y = live[x, i]
                z = live[x, j]
                w = other[y, z]
                if w < 0:
                    other[y, z] = x
                    other[z, y] = x
                    _drop_live(live, pos, cnt, lp, lpos, &nlp, y, z)
                    _drop_live(live, pos, cnt, lp, lpos, &nlp, z, y)
                    ntrip += 1
                else:
                    other[w, y] = -1
                    other[y, w] = -1
                    other[w, z] = -1
                    other[z, w] = -1
                    _add_live(live, pos, cnt, lp, lpos, &nlp, w, y)
                    _add_live(live, pos, cnt, lp, lpos, &nlp, y, w)
                    _add_live(live, pos, cnt, lp, lpos, &nlp, w, z)
                    _add_live(live, pos, cnt, lp, lpos, &nlp, z, w)
                    other[y, z] = x
                    other[z, y] = x
                other[x, y] = z
                other[y, x] = z
                other[x, z] = y
                other[z, x] = y
                _drop_live(live, pos, cnt, lp, lpos, &nlp, x, y)
                _drop_live(live, pos, cnt, lp, lpos, &nlp, y, x)
                _drop_live(live, pos, cnt, lp, lpos, &nlp, x, z)
                _drop_live(live, pos, cnt, lp, lpos, &nlp, z, x)

    del live_a, pos_a
    if ntrip < target:
        return None, None, it
    triples_a = np.empty((target, 3), dtype=np.int32)
    cdef int32_t[:, ::1] tri = triples_a
    cdef int64_t k = 0
    for x in range(n):
        for y in range(x + 1, n):
            z = other[x, y]
            if z > y:
                tri[k, 0] = x
                tri[k, 1] = y
                tri[k, 2] = z
                k += 1
    return triples_a, other_a, it


# -- matchings ---------------------------------------------------------------

def greedy_scan(const int32_t[:, ::1] edges, const int64_t[::1] order, uint8_t[::1] covered):
    """Accept edges in ``order`` whose three vertices are all uncovered."""
    cdef Py_ssize_t k = order.shape[0]
    cdef Py_ssize_t t, e, nacc = 0
    cdef int a, b, c
    out_a = np.empty(k, dtype=np.int64)
    cdef int64_t[::1] out = out_a
    with nogil:
        for t in range(k):
            e = order[t]
            a = edges[e, 0]
            b = edges[e, 1]
            c = edges[e, 2]
            if covered[a] == 0 and covered[b] == 0 and covered[c] == 0:
                covered[a] = 1
                covered[b] = 1
                covered[c] = 1
                out[nacc] = e
                nacc += 1
    return out_a[:nacc].copy()


def nibble_rounds(const int32_t[:, ::1] edges, uint8_t[::1] covered, object bit_generator,
                  double bite, double min_avg_degree, int stall_rounds, int64_t max_rounds):
    """Semi-random rounds. Returns (accepted edge ids, surviving edge ids, rounds)."""
    cdef bitgen_t* rng = _bitgen(bit_generator)
    cdef Py_ssize_t k = edges.shape[0]
    cdef Py_ssize_t nv = covered.shape[0]
    cdef Py_ssize_t t, e, nalive = 0, nnew, nmark, nacc = 0
    cdef int a, b, c, stall = 0
    cdef int64_t rounds = 0, nact
    cdef double dbar, p, u

    alive_a = np.empty(k, dtype=np.int64)
    marked_a = np.empty(k, dtype=np.int64)
    acc_a = np.empty(k, dtype=np.int64)
    deg_a = np.zeros(nv, dtype=np.int32)
    cdef int64_t[::1] alive = alive_a
    cdef int64_t[::1] marked = marked_a
    cdef int64_t[::1] acc = acc_a
    cdef int32_t[::1] deg = deg_a

    with bit_generator.lock:
        with nogil:
            for e in range(k):
                if covered[edges[e, 0]] == 0 and covered[edges[e, 1]] == 0 and covered[edges[e, 2]] == 0:
                    alive[nalive] = e
                    nalive += 1
            while nalive > 0 and rounds < max_rounds:
                nact = 0
                for t in range(nalive):
                    e = alive[t]
                    for a in range(3):
                        b = edges[e, a]
                        if deg[b] == 0:
                            nact += 1
                        deg[b] += 1
                for t in range(nalive):
                    e = alive[t]
                    deg[edges[e, 0]] = 0
                    deg[edges[e, 1]] = 0
                    deg[edges[e, 2]] = 0
                dbar = 3.0 * nalive / nact
                if dbar < min_avg_degree:
                    break
                p = bite / dbar
                if p > 1.0:
                    p = 1.0
                nmark = 0
                for t in range(nalive):
                    u = (_raw(rng) >> 11) * _TWO_M53
                    if u < p:
                        e = alive[t]
                        marked[nmark] = e
                        nmark += 1
                        deg[edges[e, 0]] += 1
                        deg[edges[e, 1]] += 1
                        deg[edges[e, 2]] += 1
                for t in range(nmark):
                    e = marked[t]
                    a = edges[e, 0]
                    b = edges[e, 1]
                    c = edges[e, 2]
                    if deg[a] == 1 and deg[b] == 1 and deg[c] == 1:
                        acc[nacc] = e
                        nacc += 1
                        covered[a] = 1
                        covered[b] = 1
                        covered[c] = 1
                for t in range(nmark):
                    e = marked[t]
                    deg[edges[e, 0]] = 0
                    deg[edges[e, 1]] = 0
                    deg[edges[e, 2]] = 0
                nnew = 0
                for t in range(nalive):
                    e = alive[t]
                    if covered[edges[e, 0]] == 0 and covered[edges[e, 1]] == 0 and covered[edges[e, 2]] == 0:
                        alive[nnew] = e
                        nnew += 1
                rounds += 1
                if nnew == nalive:
                    stall += 1
                else:
                    stall = 0
                nalive = nnew
                if stall >= stall_rounds:
                    break
    return acc_a[:nacc].copy(), alive_a[:nalive].copy(), rounds


# -- first-fit tree extension ------------------------------------------------

def first_fit_extend(const int32_t[:, ::1] partner, const int32_t[:, ::1] tree_edges,
                     int32_t[::1] phi, uint8_t[::1] allowed):
    """Embed tree edges (parent, a, b) in the given order. For each edge scan
    co-vertex pairs (y, w) of phi[parent] with y < w ascending and take the
    first with both ends allowed. Returns the number of edges placed; stops at
    the first edge that cannot be placed."""
    cdef Py_ssize_t ne = tree_edges.shape[0]
    cdef Py_ssize_t m = partner.shape[0]
    cdef Py_ssize_t i, y
    cdef int pv, w, found
    cdef Py_ssize_t placed = ne
    with nogil:
        for i in range(ne):
            pv = phi[tree_edges[i, 0]]
            if pv < 0:
                placed = i
                break
            found = 0
            for y in range(m):
                if allowed[y]:
                    w = partner[pv, y]
                    if w > y and allowed[w]:
                        phi[tree_edges[i, 1]] = <int32_t> y
                        phi[tree_edges[i, 2]] = w
                        allowed[y] = 0
                        allowed[w] = 0
                        found = 1
                        break
            if not found:
                placed = i
                break
    return placed

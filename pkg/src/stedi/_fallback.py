"""Pure-Python kernels, semantically identical to ``_core.pyx``.

Random draws come from ``bit_generator.random_raw`` so that, for the same
seed, both backends consume the same 64-bit stream in the same order.
"""
import numpy as np

_TWO_M53 = 1.0 / 9007199254740992.0


def hill_climb_sts(n, bit_generator, max_iters):
    target = n * (n - 1) // 6
    other = [[-1] * n for _ in range(n)]
    live = [[y for y in range(n) if y != x] for x in range(n)]
    pos = [[0] * n for _ in range(n)]
    for x in range(n):
        for j, y in enumerate(live[x]):
            pos[x][y] = j
    cnt = [n - 1] * n
    lp = list(range(n))
    lpos = list(range(n))
    nlp = n if n >= 3 else 0

    def drop(x, y):
        nonlocal nlp
        i = pos[x][y]
        last = live[x][cnt[x] - 1]
        live[x][i] = last
        pos[x][last] = i
        cnt[x] -= 1
        if cnt[x] == 0:
            j = lpos[x]
            u = lp[nlp - 1]
            lp[j] = u
            lpos[u] = j
            nlp -= 1

    def add(x, y):
        nonlocal nlp
        if cnt[x] == 0:
            lp[nlp] = x
            lpos[x] = nlp
            nlp += 1
        live[x][cnt[x]] = y
        pos[x][y] = cnt[x]
        cnt[x] += 1

    raw = bit_generator.random_raw
    ntrip = 0
    it = 0
    while ntrip < target and it < max_iters:
        it += 1
        r0, r1, r2 = (int(v) for v in raw(3))
        x = lp[r0 % nlp]
        c = cnt[x]
        i = r1 % c
        j = r2 % (c - 1)
        if j >= i:
            j += 1
        y = live[x][i]
        z = live[x][j]
        w = other[y][z]
        if w < 0:
            other[y][z] = other[z][y] = x
            drop(y, z)
            drop(z, y)
            ntrip += 1
        else:
            other[w][y] = other[y][w] = -1
            other[w][z] = other[z][w] = -1
            add(w, y)
            add(y, w)
            add(w, z)
            add(z, w)
            other[y][z] = other[z][y] = x
        other[x][y] = other[y][x] = z
        other[x][z] = other[z][x] = y
        drop(x, y)
        drop(y, x)
        drop(x, z)
        drop(z, x)

    if ntrip < target:
        return None, None, it
    triples = [(x, y, other[x][y]) for x in range(n) for y in range(x + 1, n) if other[x][y] > y]
    return (np.array(triples, dtype=np.int32).reshape(-1, 3),
            np.array(other, dtype=np.int32).reshape(n, n), it)


def greedy_scan(edges, order, covered):
    out = []
    for e in order.tolist():
        a, b, c = edges[e].tolist()
        if not (covered[a] or covered[b] or covered[c]):
            covered[a] = covered[b] = covered[c] = 1
            out.append(e)
    return np.array(out, dtype=np.int64)


def nibble_rounds(edges, covered, bit_generator, bite, min_avg_degree, stall_rounds, max_rounds):
    nv = covered.shape[0]
    cov = covered.astype(bool)
    alive = np.flatnonzero(~cov[edges].any(axis=1)).astype(np.int64)
    accepted = []
    rounds = 0
    stall = 0
    while len(alive) and rounds < max_rounds:
        cur = edges[alive]
        nact = np.count_nonzero(np.bincount(cur.ravel(), minlength=nv))
        dbar = 3.0 * len(alive) / nact
        if dbar < min_avg_degree:
            break
        p = min(bite / dbar, 1.0)
        u = (bit_generator.random_raw(len(alive)) >> np.uint64(11)).astype(np.float64) * _TWO_M53
        hit = u < p
        marked = alive[hit]
        marks = np.bincount(edges[marked].ravel(), minlength=nv)
        acc = marked[(marks[edges[marked]] == 1).all(axis=1)]
        cov[edges[acc].ravel()] = True
        accepted.append(acc)
        nalive = len(alive)
        alive = alive[~cov[edges[alive]].any(axis=1)]
        rounds += 1
        stall = stall + 1 if len(alive) == nalive else 0
        if stall >= stall_rounds:
            break
    covered[cov] = 1
    acc = np.concatenate(accepted) if accepted else np.empty(0, dtype=np.int64)
    return acc.astype(np.int64), alive, rounds


def first_fit_extend(partner, tree_edges, phi, allowed):
    m = partner.shape[0]
    for i, (p, a, b) in enumerate(tree_edges.tolist()):
        pv = int(phi[p])
        if pv < 0:
            return i
        row = partner[pv]
        ok = allowed.astype(bool)
        cand = np.flatnonzero(ok & (row > np.arange(m)))
        cand = cand[ok[row[cand]]]
        if len(cand) == 0:
            return i
        y = int(cand[0])
        w = int(row[y])
        phi[a] = y
        phi[b] = w
        allowed[y] = 0
        allowed[w] = 0
    return len(tree_edges)

"""Random simple 3-uniform hypergraphs for matcher experiments."""
import numpy as np

from stedi.matching import EdgeList
from stedi.rng import generator


def near_regular(N, D, seed=None):
    """Configuration-model hypergraph: ``D`` stubs per vertex, shuffled and
    cut into triples. Triples with a repeated vertex are dropped, and a
    triple survives only if each of its pairs occurs there first, which
    makes the result simple. Degrees end up close to ``D``."""
    rng = generator(seed)
    stubs = np.repeat(np.arange(N, dtype=np.int64), D)
    rng.shuffle(stubs)
    k = len(stubs) // 3
    e = np.sort(stubs[:3 * k].reshape(k, 3), axis=1)
    e = e[(e[:, 0] != e[:, 1]) & (e[:, 1] != e[:, 2])]
    keys = np.concatenate([e[:, 0] * N + e[:, 1], e[:, 0] * N + e[:, 2], e[:, 1] * N + e[:, 2]])
    _, first = np.unique(keys, return_index=True)
    is_first = np.zeros(len(keys), dtype=bool)
    is_first[first] = True
    keep = is_first.reshape(3, -1).all(axis=0)
    return EdgeList(np.ascontiguousarray(e[keep], dtype=np.int32), N)


def disjoint_triples(k):
    return EdgeList(np.arange(3 * k, dtype=np.int32).reshape(k, 3), 3 * k)

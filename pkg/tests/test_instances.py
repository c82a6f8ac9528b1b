import numpy as np

from stedi.hypergraph import TripleSystem, validate_simple
from stedi.instances import disjoint_triples, near_regular


def test_near_regular_is_simple():
    H = near_regular(500, 12, seed=3)
    assert validate_simple(TripleSystem(H.n_vertices, H.edges)).valid
    deg = np.bincount(H.edges.ravel(), minlength=500)
    assert deg.max() <= 12 and deg.mean() > 10


def test_near_regular_reproducible():
    a, b = near_regular(300, 8, seed=1), near_regular(300, 8, seed=1)
    assert np.array_equal(a.edges, b.edges)


def test_disjoint():
    H = disjoint_triples(4)
    assert H.n_vertices == 12 and len(np.unique(H.edges)) == 12

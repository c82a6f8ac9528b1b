"""The compiled and pure-Python kernels must agree bit for bit."""
import numpy as np
import pytest

from stedi import kernels
from stedi.constructors import bose
from stedi.hypertree import perfect_d_ary
from stedi.instances import near_regular
from stedi.rng import bit_generator

try:
    cy = kernels.backend("cython")
except ImportError:  # pragma: no cover
    cy = None
py = kernels.backend("python")

needs_cython = pytest.mark.skipif(cy is None, reason="compiled extension not built")


@needs_cython
@pytest.mark.parametrize("n", [7, 9, 13, 15, 31])
def test_hill_climb_agrees(n):
    a = cy.hill_climb_sts(n, bit_generator(n), 50 * n * n)
    b = py.hill_climb_sts(n, bit_generator(n), 50 * n * n)
    assert a[2] == b[2]
    assert np.array_equal(np.asarray(a[0]), np.asarray(b[0]))


@needs_cython
def test_greedy_scan_agrees():
    H = near_regular(2000, 10, seed=3)
    order = np.random.default_rng(1).permutation(len(H.edges)).astype(np.int64)
    ca = np.zeros(H.n_vertices, dtype=np.uint8)
    cb = ca.copy()
    a = cy.greedy_scan(H.edges, order, ca)
    b = py.greedy_scan(H.edges, order, cb)
    assert np.array_equal(np.asarray(a), np.asarray(b))
    assert np.array_equal(ca, cb)


@needs_cython
@pytest.mark.parametrize("seed", range(3))
def test_nibble_rounds_agree(seed):
    H = near_regular(1500, 20, seed=seed)
    ca = np.zeros(H.n_vertices, dtype=np.uint8)
    cb = ca.copy()
    ba, bb = bit_generator(seed), bit_generator(seed)
    a = cy.nibble_rounds(H.edges, ca, ba, 2.0, 2.0, 200, 10**7)
    b = py.nibble_rounds(H.edges, cb, bb, 2.0, 2.0, 200, 10**7)
    assert np.array_equal(np.asarray(a[0]), np.asarray(b[0]))
    assert np.array_equal(np.asarray(a[1]), np.asarray(b[1]))
    assert a[2] == b[2]
    assert np.array_equal(ca, cb)
    # both consumed the same stream
    assert ba.random_raw() == bb.random_raw()


@needs_cython
def test_first_fit_agrees():
    S = bose(45)
    T = perfect_d_ary(1, 4)
    edges = np.ascontiguousarray(T.edges[T.bfs_edges], dtype=np.int32)
    out = []
    for mod in (cy, py):
        phi = np.full(T.n, -1, dtype=np.int32)
        phi[0] = 3
        allowed = np.ones(S.m, dtype=np.uint8)
        allowed[3] = 0
        placed = mod.first_fit_extend(S.partner, edges, phi, allowed)
        out.append((placed, phi, allowed))
    assert out[0][0] == out[1][0] == len(edges)
    assert np.array_equal(out[0][1], out[1][1])
    assert np.array_equal(out[0][2], out[1][2])


def test_backend_names():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.backend("fortran")

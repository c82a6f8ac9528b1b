import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stedi.constructors import bose, steiner_system
from stedi.errors import DomainError
from stedi.hypergraph import TripleSystem, cross_view
from stedi.instances import disjoint_triples, near_regular
from stedi.matching import (EdgeList, StarForest, check_matching, check_star_forest,
                            nibble_matching, random_greedy_matching, split_centers, star_packing)

MATCHERS = [random_greedy_matching, nibble_matching]


@pytest.mark.parametrize("matcher", MATCHERS)
def test_disjoint_triples_all_taken(matcher):
    M, stats = matcher(disjoint_triples(20), seed=1)
    assert len(M) == 20 and stats.leave_fraction == 0


@pytest.mark.parametrize("matcher", MATCHERS)
def test_fano_single_line(matcher, fano):
    for seed in range(10):
        M, stats = matcher(fano, seed=seed)
        assert len(M) == 1
        assert stats.n_matched == 3


@pytest.mark.parametrize("matcher", MATCHERS)
def test_two_triples_sharing_vertex(matcher):
    H = EdgeList(np.array([[0, 1, 2], [2, 3, 4]], dtype=np.int32), 5)
    M, stats = matcher(H, seed=0)
    assert len(M) == 1 and stats.n_matched == 3


@pytest.mark.parametrize("matcher", MATCHERS)
def test_empty_input(matcher):
    M, stats = matcher(EdgeList(np.empty((0, 3), dtype=np.int32), 4), seed=0)
    assert len(M) == 0 and stats.leave_fraction == 1.0


def test_nibble_rejects_bad_bite():
    with pytest.raises(DomainError):
        nibble_matching(disjoint_triples(2), bite=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(10, 600), st.integers(3, 30), st.integers(0, 2**31))
def test_matchings_disjoint_and_maximal(N, D, seed):
    H = near_regular(N, D, seed=seed)
    for matcher in MATCHERS:
        M, _ = matcher(H, seed=seed)
        report = check_matching(H, M)
        assert report.valid, report.counts


def test_matching_is_reproducible():
    H = near_regular(2000, 20, seed=5)
    a, _ = nibble_matching(H, seed=9)
    b, _ = nibble_matching(H, seed=9)
    assert np.array_equal(a.edge_ids, b.edge_ids)


def test_matching_on_cross_view_uses_view_rows():
    S = bose(45)
    G = cross_view(S, np.arange(15), np.arange(15, 45))
    M, stats = nibble_matching(G, seed=2)
    assert check_matching(G, M).valid
    assert np.array_equal(M.edges, G.edges[M.edge_ids])
    assert stats.n_vertices == 45


def test_nibble_beats_greedy_on_average():
    H = near_regular(3000, 30, seed=11)
    nib = np.mean([nibble_matching(H, seed=s)[1].leave_fraction for s in range(20)])
    gr = np.mean([random_greedy_matching(H, seed=s)[1].leave_fraction for s in range(20)])
    assert nib < gr


def _star_view(k):
    # center 0, k disjoint pairs
    triples = [(0, 2 * j + 1, 2 * j + 2) for j in range(k)]
    S = TripleSystem(2 * k + 1, triples)
    return cross_view(S, [0], np.arange(1, 2 * k + 1))


def test_split_even():
    G = _star_view(6)
    aux, smap = split_centers(G, 3, seed=0)
    assert smap.group_sizes.tolist() == [[2, 2, 2]]
    assert smap.clones(0) == [0, 1, 2]


def test_split_balanced():
    G = _star_view(7)
    _, smap = split_centers(G, 3, seed=4)
    assert sorted(smap.group_sizes[0].tolist()) == [2, 2, 3]
    with pytest.raises(DomainError):
        split_centers(G, 8, strict=True)


def test_split_d1_is_identity():
    S = bose(27)
    G = cross_view(S, np.arange(9), np.arange(9, 27))
    aux, smap = split_centers(G, 1, seed=3)
    back = np.empty_like(aux.edges)
    back[:, 0] = smap.X[aux.edges[:, 0]]
    back[:, 1:] = smap.Y[aux.edges[:, 1:] - len(smap.X)]
    assert np.array_equal(back, G.edges)


def test_single_full_star():
    G = _star_view(4)
    forest, stats = star_packing(G, 4, seed=0)
    assert len(forest) == 1 and len(forest.edges) == 4
    assert stats.leave_fraction == 0
    assert check_star_forest(forest, G).valid


def test_d1_star_forest_is_matching():
    S = bose(33)
    G = cross_view(S, np.arange(11), np.arange(11, 33))
    forest, _ = star_packing(G, 1, seed=7)
    flat = forest.covered()
    assert len(np.unique(flat)) == len(flat) == 3 * len(forest.edges)


def test_unknown_matcher():
    with pytest.raises(DomainError):
        star_packing(_star_view(2), 1, matcher="hungarian")


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([n for n in range(15, 100) if n % 6 in (1, 3)]),
       st.integers(1, 4), st.floats(0.1, 0.5), st.integers(0, 2**31))
def test_split_contract_invariants(n, d, frac, seed):
    S = steiner_system(n)
    rng = np.random.default_rng(seed)
    lab = rng.random(n)
    X, Y = np.flatnonzero(lab < frac), np.flatnonzero(lab >= frac)
    G = cross_view(S, X, Y)
    aux, smap = split_centers(G, d, seed=seed)
    assert np.array_equal(smap.group_sizes.sum(axis=1), G.degrees[X])
    assert (smap.group_sizes.max(axis=1) - smap.group_sizes.min(axis=1) <= 1).all()
    forest, _ = star_packing(G, d, seed=seed)
    assert check_star_forest(forest, G).valid
    assert len(forest.covered()) == len(forest) + 2 * len(forest.edges)


def test_star_forest_checker_flags_problems():
    G = _star_view(3)
    bad = StarForest.from_edges([[0, 1, 2], [0, 3, 4]], 1)
    report = check_star_forest(bad, G)
    assert "star_too_large" in report.counts
    bad = StarForest.from_edges([[1, 0, 2]], 1)
    report = check_star_forest(bad, G)
    assert "center_outside_X" in report.counts and "edge_not_in_view" in report.counts


def _max_matching_size(edges):
    best = 0

    def grow(k, used, size):
        nonlocal best
        best = max(best, size)
        if size + (len(edges) - k) <= best:
            return
        for j in range(k, len(edges)):
            e = edges[j]
            if not (used & e):
                grow(j + 1, used | e, size + 1)

    grow(0, frozenset(), 0)
    return best


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 12), st.integers(1, 25), st.integers(0, 2**31))
def test_against_exhaustive_maximum(n, k, seed):
    rng = np.random.default_rng(seed)
    raw = {tuple(sorted(rng.choice(n, 3, replace=False).tolist())) for _ in range(k)}
    # keep a simple subfamily
    pairs, rows = set(), []
    for e in sorted(raw):
        ps = {(e[0], e[1]), (e[0], e[2]), (e[1], e[2])}
        if not ps & pairs:
            pairs |= ps
            rows.append(e)
    H = EdgeList(np.array(rows, dtype=np.int32).reshape(-1, 3), n)
    best = _max_matching_size([frozenset(e) for e in rows])
    for matcher in MATCHERS:
        got = len(matcher(H, seed=seed)[0])
        # each edge of a maximal matching meets at most three maximum edges
        assert best >= got >= best / 3


def test_maximal_can_be_a_third_of_maximum():
    rows = [(0, 1, 2), (0, 3, 4), (1, 5, 6), (2, 7, 8)]
    H = EdgeList(np.array(rows, dtype=np.int32), 9)
    sizes = {len(random_greedy_matching(H, seed=s)[0]) for s in range(40)}
    assert _max_matching_size([frozenset(e) for e in rows]) == 3
    assert sizes == {1, 3}

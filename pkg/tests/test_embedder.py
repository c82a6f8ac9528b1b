import numpy as np
import pytest
from _shared import big_sts

from stedi.config import EmbedConfig
from stedi.constructors import bose, skolem
from stedi.embedder import (Embedding, align, build_star_forests, embed, fast_path,
                            prune_to_T1, reservoir_complete, verify_embedding)
from stedi.errors import EmbeddingFailure
from stedi.hypertree import Hypertree, hyperstar, largest_perfect_at_most, perfect_d_ary
from stedi.partition import build_plan, sample_until_valid


def test_hyperstar_in_fano(fano):
    emb, kind = fast_path(fano, hyperstar(3))
    assert kind == "hyperstar"
    assert verify_embedding(fano, hyperstar(3), emb).valid


def test_greedy_fast_path():
    S, T = bose(15), perfect_d_ary(1, 2)
    emb, kind = fast_path(S, T)
    assert kind == "greedy" and verify_embedding(S, T, emb).valid


def test_no_fast_path_when_tight():
    assert fast_path(bose(21), perfect_d_ary(1, 3)) is None


def test_pigeonhole():
    with pytest.raises(EmbeddingFailure) as info:
        embed(bose(9), perfect_d_ary(1, 3))
    assert info.value.stage == "precondition"
    assert info.value.trace.outcome == "failure"


def test_strict_precondition():
    cfg = EmbedConfig(mode="paper_strict", mu=0.25)
    with pytest.raises(EmbeddingFailure) as info:
        embed(bose(15), perfect_d_ary(1, 3), cfg)
    assert info.value.stage == "precondition"


def test_verify_catches_corruption():
    S, T = bose(15), perfect_d_ary(1, 2)
    emb, _ = fast_path(S, T)
    phi = emb.phi.copy()
    spare = np.setdiff1d(np.arange(S.m), phi)[0]
    phi[T.edges[1, 2]] = spare
    report = verify_embedding(S, T, Embedding.from_phi(T, phi))
    assert [v.where for v in report.of_kind("edge_not_triple")] == [(1,)]
    phi = emb.phi.copy()
    phi[3] = phi[4]
    report = verify_embedding(S, T, Embedding.from_phi(T, phi))
    assert "not_injective" in report.counts


def test_verify_catches_partial():
    S, T = bose(15), perfect_d_ary(1, 1)
    report = verify_embedding(S, T, Embedding.from_phi(T, [0, 1, -1]))
    assert "not_total" in report.counts


def _main_run():
    S = big_sts()
    T = largest_perfect_at_most(1, int(S.m / 1.25))
    return S, T, EmbedConfig(fast_paths=False)


def test_reservoir_complete_single_leaf():
    S = bose(21)
    T = perfect_d_ary(1, 1)
    phi = np.full(3, -1, dtype=np.int32)
    phi[0] = 0
    R = np.ones(S.m, dtype=bool)
    R[0] = False
    phi, placed = reservoir_complete(S, T, phi, np.array([0]), R)
    assert placed == 1
    assert verify_embedding(S, T, Embedding.from_phi(T, phi)).valid


def test_reservoir_exhausted_when_empty():
    S = bose(21)
    T = perfect_d_ary(1, 1)
    phi = np.full(3, -1, dtype=np.int32)
    phi[0] = 0
    _, placed = reservoir_complete(S, T, phi, np.array([0]), np.zeros(S.m, dtype=bool))
    assert placed == 0


class _Plan:
    def __init__(self, t, dec):
        self.t, self.dec = t, dec


class _Forest:
    pass


def test_prune_counts_orphan_subtrees():
    from stedi.matching import StarForest
    # d = 1, t = 3 below a T0 whose last level is the single vertex 0.
    f = _Forest()
    f.T0_phi = np.array([0])
    f.classes = [np.array([0]), np.array([1, 2]), np.array([3, 4, 5, 6]),
                 np.arange(7, 15)]
    f.forests = [None,
                 StarForest.from_edges([], 1),      # vertices 1, 2 orphaned
                 StarForest.from_edges([[1, 3, 4], [2, 5, 6]], 1),
                 StarForest.from_edges([[3, 7, 8], [4, 9, 10], [5, 11, 12], [6, 13, 14]], 1)]
    f.uncovered = [None, np.array([1, 2]), np.array([], dtype=int), np.array([], dtype=int)]
    dec = type("D", (), {})()
    dec.T0 = Hypertree(1, [])
    dec.i0 = 0
    pr = prune_to_T1(f, _Plan(3, dec))
    assert pr.V_F == 15
    assert len(pr.vertices) == 1
    # each level-1 orphan takes 1 + 2 + 4 vertices with it
    assert pr.discarded[0] == 14
    assert pr.discarded[0] <= 2 * 3 * 2 ** 2


@pytest.mark.slow
def test_main_pipeline_bookkeeping():
    S, T, cfg = _main_run()
    emb, trace = embed(S, T, cfg, seed=4)
    assert trace.path == "main" and trace.outcome == "success"
    sz = trace.stage_sizes
    assert sz["V_T1"] + sum(sz["orphan_subtrees"]) == sz["V_F"]
    assert sz["E_T1"] == sz["E_T1_aligned"]
    assert sz["reservoir_used"] == T.n_edges - sz["E_T1"]
    assert verify_embedding(S, T, emb).valid
    assert [lvl["U_i"] for lvl in trace.per_level] == sz["orphans"]


@pytest.mark.slow
def test_star_forests_and_align_on_bose():
    S = bose(3003)
    T = largest_perfect_at_most(1, int(S.m / 1.25))
    # At this size the reservoir is too thin for (d); the forests do not use it.
    cfg = EmbedConfig(fast_paths=False, checks={"d": False})
    plan = build_plan(cfg, S, T)
    part, _ = sample_until_valid(S, T, cfg, plan=plan, seed=2)
    forest = build_star_forests(S, part, plan, seed=2)
    # Shallow levels have expected center degree below 1 here, so only the
    # densest level is held to delta.
    assert forest.per_level[-1]["U_over_C"] <= cfg.delta
    phi, missing = align(T, plan, forest)
    placed = phi[T.edges[:, 1]] >= 0
    assert np.count_nonzero(~placed) == len(missing)
    # every aligned edge already lands on a triple
    for p, a, b in T.edges[placed]:
        assert S.partner_of(int(phi[p]), int(phi[a])) == phi[b]


def test_small_main_path_never_false_success():
    S = skolem(19)
    T = perfect_d_ary(1, 3)
    cfg = EmbedConfig(fast_paths=False, eps=0.15, delta=0.2, rho=0.22, max_pipeline_retries=2)
    for seed in range(10):
        try:
            emb, trace = embed(S, T, cfg, seed=seed)
        except EmbeddingFailure as exc:
            assert exc.trace.outcome == "failure"
            continue
        assert verify_embedding(S, T, emb).valid


def test_trace_without_timings():
    emb, trace = embed(bose(15), perfect_d_ary(1, 2))
    d = trace.to_dict(timings=False)
    assert "timings_ms" not in d and d["path"] == "fast_greedy"

"""Acceptance criteria, one pass/fail line each.

Run under pytest (lines are repeated in the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""
import json
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _shared import big_sts  # noqa: E402
from conftest import ACCEPTANCE_LINES  # noqa: E402

from stedi.cli import main as cli_main  # noqa: E402
from stedi.config import EmbedConfig, derive_constants  # noqa: E402
from stedi.constructors import bose, random_sts, skolem, steiner_system  # noqa: E402
from stedi.embedder import embed, verify_embedding  # noqa: E402
from stedi.errors import EmbeddingFailure  # noqa: E402
from stedi.hypergraph import CrossView, TripleSystem, count_low_degree, validate_sts  # noqa: E402
from stedi.hypertree import (almost_perfect, d_sequence_tree, hyperstar,  # noqa: E402
                             largest_perfect_at_most, perfect_d_ary, perfect_size,
                             validate_hypertree)
from stedi.instances import near_regular  # noqa: E402
from stedi.matching import (check_matching, nibble_matching, random_greedy_matching,  # noqa: E402
                            split_centers, star_packing)
from stedi.oracle import oracle_embed  # noqa: E402

RESULTS = ACCEPTANCE_LINES


def _record(num, name, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    line = f"[{'PASS' if ok else 'FAIL'}] {num} {name}: {detail} ({elapsed:.1f}s, limit {limit:g}s)"
    RESULTS.append(line)
    print(line)
    return ok


def criterion_1():
    t = time.perf_counter()
    bad = []
    orders = [n for n in range(7, 100) if n % 6 in (1, 3)]
    for n in orders:
        S = steiner_system(n)
        ok = (validate_sts(S).valid and len(S) == n * (n - 1) // 6
              and (S.degrees == (n - 1) // 2).all())
        if not ok:
            bad.append(n)
    return _record(1, "STS correctness", not bad,
                   f"{len(orders) - len(bad)}/{len(orders)} orders valid", time.perf_counter() - t, 5)


def criterion_2():
    t = time.perf_counter()
    checked, bad = 0, []
    for d in range(1, 6):
        for h in range(0, 5):
            if perfect_size(d, h) > 500_000:
                continue
            T = perfect_d_ary(d, h)
            checked += 1
            if T.n != ((2 * d) ** (h + 1) - 1) // (2 * d - 1) or T.n != 2 * T.n_edges + 1:
                bad.append(("perfect", d, h))
            if h == 0:
                continue
            cap = (2 * d) ** h // 2
            for tr in sorted({0, 1, cap // 2, cap}):
                A = almost_perfect(d, h, tr)
                checked += 1
                if A.n != T.n - 2 * tr or not validate_hypertree(A).valid:
                    bad.append(("almost", d, h, tr))
    return _record(2, "hypertree algebra", not bad, f"{checked} trees checked, {len(bad)} bad",
                   time.perf_counter() - t, 5)


def criterion_3():
    t = time.perf_counter()
    rng = np.random.default_rng(3)
    bad = 0
    for k in range(200):
        N = int(rng.integers(30, 3001))
        D = int(rng.integers(5, 51))
        H = near_regular(N, D, seed=int(rng.integers(2**31)))
        for matcher in (random_greedy_matching, nibble_matching):
            M, _ = matcher(H, seed=k)
            bad += not check_matching(H, M).valid
    F = steiner_system(7)
    fano_sizes = {len(m(F, seed=s)[0]) for m in (random_greedy_matching, nibble_matching)
                  for s in range(5)}
    ok = bad == 0 and fano_sizes == {1}
    return _record(3, "matching validity and maximality", ok,
                   f"{400 - bad}/400 valid, Fano sizes {sorted(fano_sizes)}",
                   time.perf_counter() - t, 60)


def criterion_4():
    t = time.perf_counter()
    leaves = []
    for seed in range(10):
        H = near_regular(30_000, 50, seed=seed)
        leaves.append(nibble_matching(H, seed=seed)[1].leave_fraction)
    mean, worst = float(np.mean(leaves)), float(np.max(leaves))
    ok = mean <= 0.05 and worst <= 0.10
    return _record(4, "near-regular leave fraction", ok, f"mean {mean:.4f}, max {worst:.4f}",
                   time.perf_counter() - t, 300)


def criterion_5():
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    orders = [n for n in range(15, 100) if n % 6 in (1, 3)]
    bad = 0
    for k in range(100):
        n = int(rng.choice(orders))
        S = steiner_system(n)
        lab = rng.random(n)
        frac = rng.uniform(0.1, 0.5)
        G = CrossView(S, np.flatnonzero(lab < frac), np.flatnonzero(lab >= frac))
        d = int(rng.integers(1, 5))
        _, smap = split_centers(G, d, seed=k)
        bad += not np.array_equal(smap.group_sizes.sum(axis=1), G.degrees[G.X])
        forest, _ = star_packing(G, d, seed=k)
        bad += len(forest.covered()) != len(forest) + 2 * len(forest.edges)
    return _record(5, "star-packing round trip", bad == 0, f"{bad} violations over 100 views",
                   time.perf_counter() - t, 30)


def criterion_6():
    t = time.perf_counter()
    rng = np.random.default_rng(6)
    checks = violations = 0
    for n in [n for n in range(7, 100) if n % 6 in (1, 3)]:
        S = steiner_system(n)
        for _ in range(20):
            C = np.flatnonzero(rng.random(n) < rng.uniform(0.05, 0.7))
            if len(C) == 0:
                C = rng.choice(n, 1)
            L0 = C[rng.random(len(C)) < rng.uniform(0.1, 1.0)]
            alpha = float(rng.uniform(0.01, 1.0))
            checks += 1
            violations += count_low_degree(S, L0, C, alpha) > len(C) / alpha
    return _record(6, "low-degree counting bound", violations == 0,
                   f"{violations} violations in {checks} checks", time.perf_counter() - t, 60)


def criterion_7():
    t = time.perf_counter()
    c = derive_constants(0.25, mode="paper_strict")
    rhs = (3 * 0.25 - 0.25 ** 2) / (4 * 1.25)
    ok = (math.isclose(c.rho, 0.0047265625, rel_tol=1e-12)
          and math.isclose(c.delta, 2.9541e-4, rel_tol=1e-4)
          and math.isclose(2 * math.sqrt(c.rho), rhs, rel_tol=1e-12))
    return _record(7, "constants", ok, f"rho {c.rho!r}, delta {c.delta:.6e}, "
                   f"2 sqrt(rho) {2 * math.sqrt(c.rho)!r} vs {rhs!r}", time.perf_counter() - t, 1)


def _end_to_end(config, num, name):
    t = time.perf_counter()
    S = big_sts()
    T = largest_perfect_at_most(1, int(S.m / 1.25))
    ok_runs, paths = 0, []
    for master in range(10):
        try:
            emb, trace = embed(S, T, config, seed=master)
        except EmbeddingFailure as exc:
            paths.append(f"fail:{exc.stage}")
            continue
        paths.append(trace.path)
        ok_runs += verify_embedding(S, T, emb).valid
    summary = ", ".join(f"{p} x{paths.count(p)}" for p in sorted(set(paths)))
    return _record(num, name, ok_runs >= 8,
                   f"{ok_runs}/10 certified, m={S.m}, |V(T)|={T.n} [{summary}]",
                   time.perf_counter() - t, 600)


def criterion_8():
    cfg = EmbedConfig(eps=0.02, delta=0.05, rho=0.1, K=8, max_pipeline_retries=5, mu=0.25)
    return _end_to_end(cfg, "8", "end-to-end desk scale")


def criterion_8b():
    cfg = EmbedConfig(eps=0.02, delta=0.05, rho=0.1, K=8, max_pipeline_retries=5, mu=0.25,
                      fast_paths=False)
    return _end_to_end(cfg, "8b", "end-to-end desk scale, shortcuts off")


def _tiny_fixtures():
    systems = [("skolem7", skolem(7)), ("bose9", bose(9)), ("skolem13", skolem(13)),
               ("random13", random_sts(13, seed=4)), ("bose15", bose(15))]
    trees = [("star2", hyperstar(2)), ("star4", hyperstar(4)), ("perfect12", perfect_d_ary(1, 2)),
             ("almost121", almost_perfect(1, 2, 1)), ("dary3", d_sequence_tree([3])),
             ("almost133", almost_perfect(1, 3, 3))]
    return [(f"{a}+{b}", S, T) for a, S in systems for b, T in trees]


def criterion_9():
    t = time.perf_counter()
    configs = [EmbedConfig(), EmbedConfig(fast_paths=False),
               EmbedConfig(eps=0.15, delta=0.2, rho=0.22, fast_paths=False)]
    fixtures = _tiny_fixtures()
    false_success = successes = yes = 0
    for name, S, T in fixtures:
        verdict = oracle_embed(S, T)
        yes += verdict.embeddable is True
        for cfg in configs:
            for seed in range(2):
                try:
                    emb, _ = embed(S, T, cfg, seed=seed)
                except EmbeddingFailure:
                    continue
                successes += 1
                if verdict.embeddable is not True or not verify_embedding(S, T, emb).valid:
                    false_success += 1
    return _record(9, "oracle agreement", false_success == 0,
                   f"{len(fixtures)} fixtures, oracle yes on {yes}, {successes} pipeline "
                   f"successes, {false_success} false", time.perf_counter() - t, 120)


def criterion_10():
    t = time.perf_counter()
    spec = {"m": [201, 999], "d": [1, 2], "mu": [0.25, 0.5], "seeds": 5, "master_seed": 1234,
            "config": {"fast_paths": False}}
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        (tmp / "spec.json").write_text(json.dumps(spec))
        outs = []
        for run in range(2):
            out = tmp / f"run{run}.jsonl"
            cli_main(["sweep", str(tmp / "spec.json"), "-o", str(out)])
            outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0].splitlines()) == 40
    return _record(10, "sweep determinism", ok,
                   f"{len(outs[0].splitlines())} lines, identical={outs[0] == outs[1]}",
                   time.perf_counter() - t, 120)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_8b, criterion_9, criterion_10]


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_criterion(criterion):
    assert criterion()


if __name__ == "__main__":
    passed = [c() for c in CRITERIA]
    print(f"{sum(passed)}/{len(passed)} criteria passed")
    sys.exit(0 if all(passed) else 1)

"""Command-line interface.

Exit codes: 0 success, 1 the run completed with a negative outcome
(embedding failed, system invalid, tree not embeddable), 2 usage or input
error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import multiprocessing
import sys
from pathlib import Path

import numpy as np

from stedi import __version__
from stedi.config import EmbedConfig, load_config
from stedi.constructors import steiner_system
from stedi.embedder import Embedding, embed, verify_embedding
from stedi.errors import (ConstructionError, DomainError, EmbeddingFailure, InvalidSystemError,
                          ParseError)
from stedi.formats import format_sts, load_sts, load_tree
from stedi.hypergraph import validate_sts
from stedi.hypertree import (almost_perfect, d_sequence_tree, hyperstar, largest_perfect_at_most,
                             perfect_d_ary)
from stedi.oracle import oracle_embed
from stedi.rng import default_seed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_tree_spec(spec, m=None, mu=0.25):
    """``perfect:D:H``, ``almost:D:H:T``, ``dary:D1,D2,..``, ``star:K``,
    ``largest:D`` (largest perfect tree with at most ``m / (1 + mu)``
    vertices) or a path to a tree file."""
    head, _, rest = spec.partition(":")
    try:
        if head == "perfect":
            d, h = (int(x) for x in rest.split(":"))
            return perfect_d_ary(d, h)
        if head == "almost":
            d, h, t = (int(x) for x in rest.split(":"))
            return almost_perfect(d, h, t)
        if head == "dary":
            return d_sequence_tree([int(x) for x in rest.split(",") if x])
        if head == "star":
            return hyperstar(int(rest))
        if head == "largest":
            if m is None:
                raise UsageError("largest:D needs a host system")
            return largest_perfect_at_most(int(rest), max(int(m // (1 + mu)), 1))
    except ValueError as exc:
        raise UsageError(f"bad tree spec {spec!r}: {exc}") from None
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"bad tree spec {spec!r}: not a known form or an existing file")
    return load_tree(path)


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen(args):
    seed = default_seed() if args.seed is None else args.seed
    try:
        S = steiner_system(args.n, kind=args.kind, seed=seed, max_iters=args.max_iters)
    except ConstructionError as exc:
        print(f"stedi gen: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = validate_sts(S)
    if not report.valid:  # pragma: no cover - constructors are exact
        print(f"constructed system failed validation: {dict(report.counts)}", file=sys.stderr)
        return EXIT_FAIL
    _write(format_sts(S), args.out)
    return EXIT_OK


def _config_from_args(args):
    cfg = load_config(args.config) if args.config else EmbedConfig()
    changes = {}
    for key in ("mu", "mode", "matcher"):
        if getattr(args, key, None) is not None:
            changes[key] = getattr(args, key)
    if getattr(args, "no_fast_paths", False):
        changes["fast_paths"] = False
    return cfg.replace(**changes) if changes else cfg


def cmd_embed(args):
    S = load_sts(args.sts)
    cfg = _config_from_args(args)
    T = parse_tree_spec(args.tree, S.m, cfg.mu)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg.seed is not None else default_seed())
    try:
        emb, trace = embed(S, T, cfg, seed=seed)
        out = trace.to_dict(timings=not args.no_timings)
        out["embedding"] = emb.to_dict()
        code = EXIT_OK
    except EmbeddingFailure as exc:
        out = exc.trace.to_dict(timings=not args.no_timings) if exc.trace else {
            "outcome": "failure", "failure": {"stage": exc.stage, "message": str(exc)}}
        code = EXIT_FAIL
    _write(json.dumps(out, indent=2) + "\n", args.out)
    return code


def cmd_oracle(args):
    S = load_sts(args.sts)
    T = parse_tree_spec(args.tree, S.m)
    res = oracle_embed(S, T, budget=args.budget, force=args.force)
    out = {"m": S.m, "tree_vertices": T.n, "tree_edges": T.n_edges, **res.to_dict()}
    _write(json.dumps(out) + "\n", args.out)
    return EXIT_OK if res.embeddable else EXIT_FAIL


def cmd_verify(args):
    S = load_sts(args.sts)
    report = validate_sts(S)
    out = {"sts": report.to_dict()}
    ok = report.valid
    if args.embedding:
        if not args.tree:
            raise UsageError("--embedding needs --tree")
        T = parse_tree_spec(args.tree, S.m)
        data = json.loads(Path(args.embedding).read_text())
        phi = data.get("embedding", data).get("phi")
        if phi is None:
            raise UsageError("embedding file has no phi")
        er = verify_embedding(S, T, Embedding.from_phi(T, phi))
        out["embedding"] = er.to_dict()
        ok = ok and er.valid
    _write(json.dumps(out) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


# Sweeps ---------------------------------------------------------------------

_SWEEP_SYSTEMS = {}


def load_sweep_spec(path):
    spec = json.loads(Path(path).read_text())
    grid = {k: spec.get(k) for k in ("m", "d", "mu")}
    for k, v in grid.items():
        if not isinstance(v, list) or not v:
            raise UsageError(f"sweep grid axis {k!r} must be a nonempty list")
    seeds = spec.get("seeds", 10)
    seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    if not seeds or len(set(seeds)) != len(seeds):
        raise UsageError("seeds must be nonempty and distinct")
    spec["seeds"] = seeds
    spec.setdefault("master_seed", default_seed())
    spec.setdefault("sts", "auto")
    spec.setdefault("config", {})
    return spec


def _sweep_system(kind, m, master):
    key = (kind, m)
    if key not in _SWEEP_SYSTEMS:
        _SWEEP_SYSTEMS[key] = steiner_system(m, kind=kind,
                                             seed=np.random.SeedSequence([master, m]))
    return _SWEEP_SYSTEMS[key]


def _run_trial(job):
    idx, point, seed, spec, timings = job
    m, d, mu = point
    S = _sweep_system(spec["sts"], m, spec["master_seed"])
    cfg = EmbedConfig.from_mapping({**spec["config"], "mu": mu})
    T = largest_perfect_at_most(d, max(int(m // (1 + mu)), 1))
    row = {"trial": idx, "m": m, "d": d, "mu": mu, "seed": seed}
    try:
        _, trace = embed(S, T, cfg, seed=np.random.SeedSequence([spec["master_seed"], m, d,
                                                                 int(mu * 1e6), seed]))
    except EmbeddingFailure as exc:
        trace = exc.trace
    except DomainError as exc:
        row.update({"outcome": "error", "failure": {"stage": "setup", "message": str(exc)}})
        return idx, row
    body = trace.to_dict(timings=timings)
    body.pop("seed", None)
    row.update(body)
    return idx, row


def _summary(rows):
    groups = {}
    for r in rows:
        groups.setdefault((r["m"], r["d"], r["mu"]), []).append(r)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "d", "mu", "trials", "successes", "success_rate", "mean_leave_fraction",
                "mean_reservoir_used"])
    for (m, d, mu), rs in groups.items():
        ok = sum(r.get("outcome") == "success" for r in rs)
        leaves = [lv["leave_fraction"] for r in rs for lv in r.get("per_level") or []]
        used = [r["stage_sizes"]["reservoir_used"] for r in rs
                if r.get("stage_sizes", {}).get("reservoir_used") is not None]
        w.writerow([m, d, mu, len(rs), ok, f"{ok / len(rs):.4f}",
                    f"{np.mean(leaves):.6f}" if leaves else "",
                    f"{np.mean(used):.3f}" if used else ""])
    return buf.getvalue()


def run_sweep(spec, workers=1, timings=False):
    """Run every (grid point, seed) trial; returns rows ordered by trial."""
    points = list(itertools.product(spec["m"], spec["d"], spec["mu"]))
    jobs = [(i, pt, s, spec, timings)
            for i, (pt, s) in enumerate(itertools.product(points, spec["seeds"]))]
    for m in spec["m"]:
        _sweep_system(spec["sts"], m, spec["master_seed"])
    if workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            results = pool.map(_run_trial, jobs, chunksize=1)
    else:
        results = [_run_trial(j) for j in jobs]
    return [row for _, row in sorted(results, key=lambda r: r[0])]


def cmd_sweep(args):
    spec = load_sweep_spec(args.spec)
    rows = run_sweep(spec, workers=args.workers, timings=args.timings)
    lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)
    _write(lines, args.out)
    if args.summary:
        Path(args.summary).write_text(_summary(rows))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="stedi",
                                description="Steiner triple systems and hypertree embeddings")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a Steiner triple system")
    g.add_argument("kind", choices=["bose", "skolem", "random", "auto"])
    g.add_argument("n", type=int)
    g.add_argument("--seed", type=int, default=None, help="default: $STEDI_SEED or 0")
    g.add_argument("--max-iters", type=int, default=None, help="hill-climb budget (50 n^2)")
    g.add_argument("-o", "--out", default=None)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("embed", help="embed a hypertree into a system")
    e.add_argument("sts")
    e.add_argument("tree", help="tree file or perfect:D:H, almost:D:H:T, dary:D1,..., "
                                "star:K, largest:D")
    e.add_argument("--config", default=None, help="key = value or JSON config file")
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--mu", type=float, default=None)
    e.add_argument("--mode", choices=["practical", "paper_strict"], default=None)
    e.add_argument("--matcher", choices=["greedy", "nibble"], default=None)
    e.add_argument("--no-fast-paths", action="store_true")
    e.add_argument("--no-timings", action="store_true")
    e.add_argument("-o", "--out", default=None)
    e.set_defaults(func=cmd_embed)

    s = sub.add_parser("sweep", help="run a seeded parameter grid")
    s.add_argument("spec", help="JSON sweep spec")
    s.add_argument("-o", "--out", default=None, help="JSONL output (default stdout)")
    s.add_argument("--summary", default=None, help="summary CSV path")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (output no longer reproducible)")
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", help="exhaustive search on a tiny instance")
    o.add_argument("sts")
    o.add_argument("tree")
    o.add_argument("--budget", type=int, default=10**7, help="search-node limit")
    o.add_argument("--force", action="store_true", help="lift the size limits")
    o.add_argument("-o", "--out", default=None)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="validate a system, optionally an embedding")
    v.add_argument("sts")
    v.add_argument("--tree", default=None)
    v.add_argument("--embedding", default=None, help="JSON file from `embed`")
    v.add_argument("-o", "--out", default=None)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, ParseError, InvalidSystemError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"stedi {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Plain-text formats for triple systems and hypertrees.

STS files: header ``m k`` then k lines ``a b c`` (0-based, sorted).
Tree files: header ``|V| |E|`` then lines ``parent childA childB``.
Blank lines and lines starting with ``#`` are ignored on load.
"""
from pathlib import Path

import numpy as np

from stedi.errors import DomainError, InvalidSystemError, ParseError
from stedi.hypergraph import TripleSystem, validate_sts
from stedi.hypertree import Hypertree, validate_hypertree


def _records(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _ints(line, lineno, count):
    parts = line.split()
    if len(parts) != count:
        raise ParseError(f"expected {count} integers, got {len(parts)}", lineno)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"non-integer token in {line!r}", lineno) from None


def _parse_rows(text, what):
    records = _records(text)
    try:
        lineno, header = next(records)
    except StopIteration:
        raise ParseError(f"empty {what} file", 1) from None
    size, k = _ints(header, lineno, 2)
    if size < 0 or k < 0:
        raise ParseError("negative count in header", lineno)
    rows = np.empty((k, 3), dtype=np.int64)
    last = lineno
    i = 0
    for lineno, line in records:
        if i == k:
            raise ParseError(f"more than {k} rows", lineno)
        rows[i] = _ints(line, lineno, 3)
        if rows[i].min() < 0 or rows[i].max() >= size:
            raise ParseError(f"vertex outside [0, {size})", lineno)
        if len(set(rows[i].tolist())) < 3:
            raise ParseError("row repeats a vertex", lineno)
        last = lineno
        i += 1
    if i < k:
        raise ParseError(f"file ends after {i} of {k} rows", last + 1)
    return size, rows


def format_sts(sys):
    lines = [f"{sys.m} {len(sys.triples)}"]
    lines.extend(f"{a} {b} {c}" for a, b, c in sys.triples.tolist())
    return "\n".join(lines) + "\n"


def parse_sts(text, validate=False):
    m, rows = _parse_rows(text, "STS")
    try:
        sys = TripleSystem(m, rows)
    except DomainError as exc:  # pragma: no cover - rows are prechecked
        raise ParseError(str(exc)) from None
    if validate:
        report = validate_sts(sys)
        if not report.valid:
            raise InvalidSystemError(f"not a Steiner triple system: {dict(report.counts)}", report)
    return sys


def save_sts(sys, path):
    Path(path).write_text(format_sts(sys))


def load_sts(path, validate=False):
    """Parse an STS file. Malformed text raises ParseError; with
    ``validate=True`` a well-formed file that is not an STS raises
    InvalidSystemError instead."""
    return parse_sts(Path(path).read_text(), validate=validate)


def format_tree(T):
    lines = [f"{T.n} {len(T.edges)}"]
    lines.extend(f"{p} {a} {b}" for p, a, b in T.edges.tolist())
    return "\n".join(lines) + "\n"


def parse_tree(text, validate=True):
    n, rows = _parse_rows(text, "tree")
    if n < 1:
        raise ParseError("a tree needs at least one vertex", 1)
    T = Hypertree(n, rows)
    if validate:
        report = validate_hypertree(T)
        if not report.valid:
            raise InvalidSystemError(f"not a hypertree: {dict(report.counts)}", report)
    return T


def save_tree(T, path):
    Path(path).write_text(format_tree(T))


def load_tree(path, validate=True):
    return parse_tree(Path(path).read_text(), validate=validate)

"""Steiner triple systems of prescribed order.

``bose`` covers n = 3 mod 6, ``skolem`` covers n = 1 mod 6 and
``random_sts`` runs a pair-swapping hill climb for any admissible n.
"""
import numpy as np

from stedi import kernels
from stedi.errors import ConstructionError, DomainError
from stedi.hypergraph import TripleSystem
from stedi.rng import bit_generator


def is_admissible(n):
    return n >= 0 and n % 6 in (1, 3)


def bose(n):
    """Bose construction over the idempotent commutative quasigroup
    ``x o y = (x + y)(k + 1) mod q`` on ``Z_q``, ``q = n / 3 = 2k + 1``.
    Point ``(x, i)`` gets id ``x + q i``."""
    if n < 3 or n % 6 != 3:
        raise DomainError(f"bose needs n = 3 mod 6, got {n}")
    q = n // 3
    k = (q - 1) // 2
    triples = [(x, x + q, x + 2 * q) for x in range(q)]
    for i in range(3):
        j = (i + 1) % 3
        for x in range(q):
            for y in range(x + 1, q):
                z = ((x + y) * (k + 1)) % q
                triples.append((x + q * i, y + q * i, z + q * j))
    return TripleSystem(n, triples, is_sts=True)


def skolem(n):
    """Skolem construction for n = 6t + 1 from the half-idempotent
    commutative quasigroup on ``Z_2t``. Point ``(x, i)`` gets id
    ``x + 2t i``; the extra point is ``n - 1``."""
    if n < 7 or n % 6 != 1:
        raise DomainError(f"skolem needs n = 1 mod 6 and n >= 7, got {n}")
    t = (n - 1) // 6
    q = 2 * t
    inf = n - 1
    half = [s // 2 if s % 2 == 0 else t + (s - 1) // 2 for s in range(q)]
    triples = [(x, x + q, x + 2 * q) for x in range(t)]
    for i in range(3):
        j = (i + 1) % 3
        for x in range(t):
            triples.append((inf, t + x + q * i, x + q * j))
        for x in range(q):
            for y in range(x + 1, q):
                triples.append((x + q * i, y + q * i, half[(x + y) % q] + q * j))
    return TripleSystem(n, triples, is_sts=True)


def random_sts(n, seed=None, max_iters=None):
    """A random STS(n) by hill climbing.

    Each step picks a live point x and two points y, z it is not yet paired
    with; the triple {x, y, z} is added, evicting the triple through
    {y, z} if one exists. Raises ConstructionError after ``max_iters``
    steps (default ``50 n^2``).
    """
    if not is_admissible(n):
        raise DomainError(f"no STS of order {n}: need n = 1 or 3 mod 6")
    if max_iters is None:
        max_iters = 50 * n * n
    triples, other, iters = kernels.hill_climb_sts(n, bit_generator(seed), int(max_iters))
    if triples is None:
        raise ConstructionError(f"hill climb for n={n} did not finish in {iters} steps")
    return TripleSystem(n, triples, is_sts=True, partner=other)


def steiner_system(n, kind="auto", seed=None, max_iters=None):
    """Dispatch on ``kind`` in {'auto', 'bose', 'skolem', 'random'}."""
    if kind == "bose":
        return bose(n)
    if kind == "skolem":
        return skolem(n)
    if kind == "random":
        return random_sts(n, seed=seed, max_iters=max_iters)
    if kind != "auto":
        raise DomainError(f"unknown construction {kind!r}")
    if n % 6 == 3:
        return bose(n)
    if n % 6 == 1 and n >= 7:
        return skolem(n)
    if n in (0, 1):
        return TripleSystem(n, np.empty((0, 3), dtype=np.int32), is_sts=True)
    raise DomainError(f"no STS of order {n}: need n = 1 or 3 mod 6")

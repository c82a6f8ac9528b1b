"""Seed handling.

Every random choice in the package draws from a PCG64 bit generator. Seeds
may be ints, ``numpy.random.SeedSequence`` objects or None; None falls back
to the ``STEDI_SEED`` environment variable, then to 0, so runs are
reproducible unless the caller asks otherwise.
"""
import os

import numpy as np


def default_seed():
    value = os.environ.get("STEDI_SEED")
    return int(value) if value not in (None, "") else 0


def seed_sequence(seed=None):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if seed is None:
        seed = default_seed()
    return np.random.SeedSequence(int(seed))


def bit_generator(seed=None):
    return np.random.PCG64(seed_sequence(seed))


def generator(seed=None):
    return np.random.Generator(bit_generator(seed))


def spawn(seed, k):
    """``k`` independent child seed sequences of ``seed``."""
    return seed_sequence(seed).spawn(k)


def describe(seed):
    """A JSON-friendly rendering of a seed."""
    if isinstance(seed, np.random.SeedSequence):
        ent = seed.entropy
        ent = [int(x) for x in ent] if isinstance(ent, (list, tuple, np.ndarray)) else int(ent)
        return {"entropy": ent, "spawn_key": [int(k) for k in seed.spawn_key]}
    return None if seed is None else int(seed)

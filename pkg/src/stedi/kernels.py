"""Hot-loop kernels, compiled when available.

The Cython extension ``stedi._core`` is used if it imports; otherwise the
pure-Python twin in ``stedi._fallback`` is used. Set ``STEDI_PURE_PYTHON=1``
to force the fallback. Both backends produce identical output for identical
inputs and bit-generator state.
"""
import os

from stedi import _fallback

BACKEND = "python"
_impl = _fallback

if not os.environ.get("STEDI_PURE_PYTHON"):
    try:
        from stedi import _core as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _fallback


def backend(name=None):
    """Return the kernel module for ``name`` ('cython' or 'python'), or the
    active one when ``name`` is None."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "cython":
        from stedi import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")


def hill_climb_sts(n, bit_generator, max_iters):
    return _impl.hill_climb_sts(n, bit_generator, max_iters)


def greedy_scan(edges, order, covered):
    return _impl.greedy_scan(edges, order, covered)


def nibble_rounds(edges, covered, bit_generator, bite, min_avg_degree, stall_rounds, max_rounds):
    return _impl.nibble_rounds(edges, covered, bit_generator, bite, min_avg_degree,
                               stall_rounds, max_rounds)


def first_fit_extend(partner, tree_edges, phi, allowed):
    return _impl.first_fit_extend(partner, tree_edges, phi, allowed)

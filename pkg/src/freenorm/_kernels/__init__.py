"""Hot-kernel dispatch.

The heavy inner loops (batched reduced concatenation, ball scans, integer
convolution) run compiled under numba by default, with a vectorized numpy
fallback and a pure-Python reference.  Selection order:

1. an explicit :func:`set_backend` call,
2. the ``FREENORM_KERNEL`` environment variable (``numba``/``numpy``/``python``),
3. numba when importable, else numpy.

All paths work on exact integers and produce bit-identical results; the flag
trades speed only.
"""

from __future__ import annotations

import os

import numpy as np

from . import encoding, np_impl, py_impl
from .encoding import CODE_DTYPE, ball_matrix, codes_to_word, invert_rows, pack_words, word_to_codes

try:  # pragma: no cover - exercised implicitly
    from . import nb_impl

    _NUMBA_OK = True
except Exception:  # numba missing or broken
    nb_impl = None  # type: ignore[assignment]
    _NUMBA_OK = False

_FORCED: str | None = None
_VALID = ("numba", "numpy", "python")


def set_backend(name: str | None) -> None:
    """Force a kernel backend for this process (None restores auto)."""
    global _FORCED
    if name is not None and name not in _VALID:
        raise ValueError(f"unknown kernel backend {name!r}; expected one of {_VALID}")
    _FORCED = name


def active_backend() -> str:
    name = _FORCED or os.environ.get("FREENORM_KERNEL", "").strip().lower() or None
    if name is None:
        return "numba" if _NUMBA_OK else "numpy"
    if name not in _VALID:
        raise ValueError(f"FREENORM_KERNEL={name!r} is not one of {_VALID}")
    if name == "numba" and not _NUMBA_OK:
        return "numpy"
    return name


def _array_impl():
    # The pure-Python flag still uses numpy for the batched array scans;
    # "python" only governs scalar-level code paths (exact convolution).
    return nb_impl if active_backend() == "numba" and _NUMBA_OK else np_impl


def reduce_concat_pairs(lmat, llen, rmat, rlen):
    return _array_impl().reduce_concat_pairs(lmat, llen, rmat, rlen)


def conjugate_lengths(gcodes, vmat, vlen):
    return _array_impl().conjugate_lengths(gcodes, vmat, vlen)


def aggregate_rows(mat, lengths, coeffs):
    return np_impl.aggregate_rows(mat, lengths, coeffs)


def growth_scan(nletters: int, radius: int, blocks: list[list[int]]) -> list[int]:
    """Dispatch the max-image-length ball scan; blocks are per-letter images."""
    backend = active_backend()
    if backend == "python":
        return py_impl.growth_scan(nletters, radius, blocks)
    maxblock = max((len(b) for b in blocks), default=0)
    block_mat = np.zeros((nletters, max(maxblock, 1)), dtype=CODE_DTYPE)
    block_len = np.zeros(nletters, dtype=np.int64)
    for i, b in enumerate(blocks):
        block_mat[i, : len(b)] = b
        block_len[i] = len(b)
    if backend == "numba":
        out = nb_impl.growth_scan(nletters, radius, block_mat, block_len)
    else:
        out = np_impl.growth_scan(nletters, radius, block_mat, block_len)
    return [int(v) for v in out]

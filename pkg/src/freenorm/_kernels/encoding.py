"""Array encoding of reduced words for the hot kernels.

A letter is a 16-bit code: generator ``i`` is ``2*i + 2``, its inverse is
``2*i + 3``, and ``0`` pads rows.  Two letters cancel exactly when
``a == b ^ 1``, and the numeric order of codes is the ShortLex letter order,
so lexicographic sorts of ``(length, row)`` give canonical ShortLex order.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..words import GroupContext, Word

CODE_DTYPE = np.int16


def word_to_codes(w: Word) -> np.ndarray:
    out = np.empty(len(w), dtype=CODE_DTYPE)
    pos = 0
    for g, e in w.syllables:
        code = 2 * g + 2 if e > 0 else 2 * g + 3
        n = abs(e)
        out[pos : pos + n] = code
        pos += n
    return out


def codes_to_word(ctx: GroupContext, codes: np.ndarray) -> Word:
    """Decode a reduced row; adjacent equal codes are the only syllable runs,
    so a plain run-length pass suffices (no cancellation can occur)."""
    syllables = []
    run_code = 0
    run_len = 0
    for c in codes.tolist():
        if c == 0:
            break
        if c == run_code:
            run_len += 1
            continue
        if run_code:
            g = (run_code - 2) >> 1
            syllables.append((g, run_len if run_code & 1 == 0 else -run_len))
        run_code = c
        run_len = 1
    if run_code:
        g = (run_code - 2) >> 1
        syllables.append((g, run_len if run_code & 1 == 0 else -run_len))
    return Word(ctx, tuple(syllables))


def pack_words(ws: list[Word], width: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Pack words into a zero-padded code matrix plus a length vector."""
    lengths = np.array([len(w) for w in ws], dtype=np.int64)
    wmax = int(lengths.max()) if len(ws) else 0
    if width is None:
        width = max(wmax, 1)
    if width < wmax:
        raise ValueError(f"width {width} too small for longest word {wmax}")
    mat = np.zeros((len(ws), width), dtype=CODE_DTYPE)
    for i, w in enumerate(ws):
        mat[i, : lengths[i]] = word_to_codes(w)
    return mat, lengths


def invert_rows(mat: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Rowwise inverse words: reverse the used prefix and flip each letter."""
    n, width = mat.shape
    j = np.arange(width)
    idx = lengths[:, None] - 1 - j
    take = np.clip(idx, 0, max(width - 1, 0))
    rev = mat[np.arange(n)[:, None], take]
    rev = np.where(idx >= 0, rev ^ 1, 0)
    return rev.astype(CODE_DTYPE)


@lru_cache(maxsize=4)
def ball_matrix(rank: int, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """All reduced words of length <= radius, ShortLex order, as code rows.

    Cached because tree-geometry scans reuse the same ball for many words.
    """
    nletters = 2 * rank
    codes = np.arange(2, 2 + nletters, dtype=CODE_DTYPE)
    levels = [np.zeros((1, max(radius, 1)), dtype=CODE_DTYPE)]
    lengths = [np.zeros(1, dtype=np.int64)]
    if radius >= 1:
        lvl = np.zeros((nletters, max(radius, 1)), dtype=CODE_DTYPE)
        lvl[:, 0] = codes
        levels.append(lvl)
        lengths.append(np.full(nletters, 1, dtype=np.int64))
        for depth in range(2, radius + 1):
            prev = levels[-1]
            last = prev[:, depth - 2]
            grid = np.broadcast_to(codes, (prev.shape[0], nletters))
            allowed = grid != (last ^ 1)[:, None]
            child_letters = grid[allowed]
            children = np.repeat(prev, nletters - 1, axis=0)
            children[:, depth - 1] = child_letters
            levels.append(children)
            lengths.append(np.full(children.shape[0], depth, dtype=np.int64))
    mat = np.vstack(levels)
    length = np.concatenate(lengths)
    mat.setflags(write=False)
    length.setflags(write=False)
    return mat, length

"""Vectorized numpy implementations of the word kernels.

These are the fallback path when numba is unavailable or disabled via
``FREENORM_KERNEL=numpy``.  All arithmetic is on integers, so results are
bit-identical to the numba and pure-Python paths.
"""

from __future__ import annotations

import numpy as np

from .encoding import CODE_DTYPE


def reduce_concat_pairs(
    lmat: np.ndarray, llen: np.ndarray, rmat: np.ndarray, rlen: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Rowwise reduced concatenation of paired words.

    Cancellation happens only at the junction because both sides are already
    reduced; ``k`` is the length of the cancelling suffix/prefix match.
    """
    n, lw = lmat.shape
    rw = rmat.shape[1]
    rows = np.arange(n)[:, None]
    minlen = np.minimum(llen, rlen)
    tw = int(minlen.max()) if n else 0
    if tw > 0:
        t = np.arange(tw)
        rev_idx = np.clip(llen[:, None] - 1 - t, 0, lw - 1)
        u_rev = lmat[rows, rev_idx]
        head = rmat[:, :tw]
        eq = (u_rev == (head ^ 1)) & (t < minlen[:, None])
        k = np.cumprod(eq, axis=1).sum(axis=1)
    else:
        k = np.zeros(n, dtype=np.int64)
    keep_l = llen - k
    outlen = keep_l + rlen - k
    width = max(int(outlen.max()) if n else 0, 1)
    j = np.arange(width)
    from_l = j < keep_l[:, None]
    l_idx = np.clip(np.broadcast_to(j, (n, width)), 0, lw - 1)
    l_part = lmat[rows, l_idx]
    r_idx = np.clip(k[:, None] + j - keep_l[:, None], 0, rw - 1)
    r_part = rmat[rows, r_idx]
    out = np.where(from_l, l_part, r_part)
    out[j >= outlen[:, None]] = 0
    return out.astype(CODE_DTYPE), outlen


def conjugate_lengths(g: np.ndarray, vmat: np.ndarray, vlen: np.ndarray) -> np.ndarray:
    """Length of ``v^-1 g v`` per row ``v``, without building the words.

    The first cancellation count equals the common-prefix length of ``v`` and
    ``g``; the second is resolved by reading the tail of ``v^-1 g`` from
    either ``g`` or ``v`` directly.
    """
    n, vw = vmat.shape
    gl = g.shape[0]
    if gl == 0:
        return np.zeros(n, dtype=np.int64)
    rows = np.arange(n)[:, None]
    lim1 = np.minimum(vlen, gl)
    tw = min(vw, gl)
    if tw > 0:
        t = np.arange(tw)
        eq = (vmat[:, :tw] == g[:tw]) & (t < lim1[:, None])
        t1 = np.cumprod(eq, axis=1).sum(axis=1)
    else:
        t1 = np.zeros(n, dtype=np.int64)
    w1len = vlen + gl - 2 * t1
    lim2 = np.minimum(w1len, vlen)
    sw = int(lim2.max()) if n else 0
    if sw > 0:
        s = np.arange(sw)
        ji = w1len[:, None] - 1 - s
        ucnt = vlen[:, None] - t1[:, None]  # letters of v^-1 surviving in w1
        from_g = ji >= ucnt
        g_idx = np.clip(ji - ucnt + t1[:, None], 0, gl - 1)
        c_g = g[g_idx]
        v_idx = np.clip(vlen[:, None] - 1 - ji, 0, vw - 1)
        c_v = vmat[rows, v_idx] ^ 1
        c = np.where(from_g, c_g, c_v)
        head = vmat[:, :sw]
        eq2 = (c == (head ^ 1)) & (s < lim2[:, None])
        t2 = np.cumprod(eq2, axis=1).sum(axis=1)
    else:
        t2 = np.zeros(n, dtype=np.int64)
    return w1len + vlen - 2 * t2


def aggregate_rows(
    mat: np.ndarray, lengths: np.ndarray, coeffs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sum coefficients of equal rows; output in ShortLex order, zeros pruned."""
    if mat.shape[0] == 0:
        return mat, lengths, coeffs
    keys = tuple(mat[:, c] for c in range(mat.shape[1] - 1, -1, -1)) + (lengths,)
    order = np.lexsort(keys)
    smat = mat[order]
    slen = lengths[order]
    scoef = coeffs[order]
    boundary = np.empty(len(slen), dtype=bool)
    boundary[0] = True
    if len(slen) > 1:
        boundary[1:] = (slen[1:] != slen[:-1]) | np.any(smat[1:] != smat[:-1], axis=1)
    starts = np.flatnonzero(boundary)
    sums = np.add.reduceat(scoef, starts)
    keep = sums != 0
    return smat[starts][keep], slen[starts][keep], sums[keep]


def growth_scan(
    nletters: int, radius: int, block_mat: np.ndarray, block_len: np.ndarray, chunk: int = 100_000
) -> np.ndarray:
    """Max image length per level of the ball, by batched level expansion."""
    maxout = np.zeros(radius + 1, dtype=np.int64)
    codes = np.arange(2, 2 + nletters, dtype=CODE_DTYPE)
    # level 1 seeds: images of single letters
    cur_words = codes[:, None]
    cur_imgs = block_mat.copy()
    cur_ilen = block_len.copy()
    if radius >= 1:
        maxout[1] = int(cur_ilen.max()) if len(cur_ilen) else 0
    for depth in range(2, radius + 1):
        last = cur_words[:, -1]
        grid = np.broadcast_to(codes, (cur_words.shape[0], nletters))
        allowed = grid != (last ^ 1)[:, None]
        child_letters = grid[allowed]
        parent_idx = np.repeat(np.arange(cur_words.shape[0]), nletters - 1)
        n_children = len(child_letters)
        blk_idx = (child_letters - 2).astype(np.int64)
        keep_imgs = depth < radius
        out_parts = []
        len_parts = []
        best = 0
        for lo in range(0, n_children, chunk):
            hi = min(lo + chunk, n_children)
            pi = parent_idx[lo:hi]
            bi = blk_idx[lo:hi]
            imgs, ilen = reduce_concat_pairs(
                cur_imgs[pi], cur_ilen[pi], block_mat[bi], block_len[bi]
            )
            if len(ilen):
                best = max(best, int(ilen.max()))
            if keep_imgs:
                out_parts.append(imgs)
                len_parts.append(ilen)
        maxout[depth] = best
        if keep_imgs:
            width = max(p.shape[1] for p in out_parts) if out_parts else 1
            padded = [
                np.pad(p, ((0, 0), (0, width - p.shape[1]))) if p.shape[1] < width else p
                for p in out_parts
            ]
            cur_imgs = np.vstack(padded)
            cur_ilen = np.concatenate(len_parts)
            words = np.repeat(cur_words, nletters - 1, axis=0)
            cur_words = np.column_stack([words, child_letters])
    return maxout

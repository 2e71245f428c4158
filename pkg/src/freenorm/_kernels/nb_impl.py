"""Numba-compiled hot kernels.

Each mirrors a function in ``np_impl`` and produces bit-identical integer
output; ``prange`` loops write disjoint slots, so thread count never affects
results.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .encoding import CODE_DTYPE


@njit(cache=True, parallel=True)
def _reduce_concat_pairs(lmat, llen, rmat, rlen, out, outlen):
    n = lmat.shape[0]
    for i in prange(n):
        m = llen[i]
        r = rlen[i]
        lim = min(m, r)
        k = 0
        while k < lim and lmat[i, m - 1 - k] == (rmat[i, k] ^ 1):
            k += 1
        keep = m - k
        for j in range(keep):
            out[i, j] = lmat[i, j]
        for j in range(r - k):
            out[i, keep + j] = rmat[i, k + j]
        outlen[i] = keep + r - k


def reduce_concat_pairs(lmat, llen, rmat, rlen):
    n = lmat.shape[0]
    width = max(lmat.shape[1] + rmat.shape[1], 1)
    out = np.zeros((n, width), dtype=CODE_DTYPE)
    outlen = np.zeros(n, dtype=np.int64)
    _reduce_concat_pairs(lmat, llen, rmat, rlen, out, outlen)
    trim = max(int(outlen.max()) if n else 0, 1)
    return out[:, :trim], outlen


@njit(cache=True, parallel=True)
def _conjugate_lengths(g, vmat, vlen, out):
    n = vmat.shape[0]
    gl = g.shape[0]
    for i in prange(n):
        vl = vlen[i]
        lim1 = min(vl, gl)
        t1 = 0
        while t1 < lim1 and vmat[i, t1] == g[t1]:
            t1 += 1
        w1len = vl + gl - 2 * t1
        ucnt = vl - t1
        lim2 = min(w1len, vl)
        t2 = 0
        while t2 < lim2:
            ji = w1len - 1 - t2
            if ji >= ucnt:
                c = g[ji - ucnt + t1]
            else:
                c = vmat[i, vl - 1 - ji] ^ 1
            if c == (vmat[i, t2] ^ 1):
                t2 += 1
            else:
                break
        out[i] = w1len + vl - 2 * t2


def conjugate_lengths(g, vmat, vlen):
    out = np.zeros(vmat.shape[0], dtype=np.int64)
    _conjugate_lengths(g, vmat, vlen, out)
    return out


@njit(cache=True)
def _growth_scan(nletters, radius, block_mat, block_len, maxout):
    maxblock = block_mat.shape[1]
    img = np.zeros(radius * max(maxblock, 1) + 1, dtype=CODE_DTYPE)
    img_len_at = np.zeros(radius + 1, dtype=np.int64)
    letter_at = np.zeros(radius + 1, dtype=np.int64)
    next_code = np.zeros(radius + 2, dtype=np.int64)
    undo = np.zeros((radius + 1, max(maxblock, 1)), dtype=CODE_DTYPE)
    undo_cnt = np.zeros(radius + 1, dtype=np.int64)
    depth = 0
    next_code[1] = 2
    while True:
        pushed = False
        if depth < radius:
            c = next_code[depth + 1]
            while c < 2 + nletters and depth > 0 and c == (letter_at[depth] ^ 1):
                c += 1
            if c < 2 + nletters:
                next_code[depth + 1] = c + 1
                ci = c - 2
                base = img_len_at[depth]
                blen = block_len[ci]
                t = 0
                while t < blen and base - t > 0 and img[base - t - 1] == (block_mat[ci, t] ^ 1):
                    t += 1
                for j in range(t):
                    undo[depth + 1, j] = img[base - t + j]
                undo_cnt[depth + 1] = t
                pos = base - t
                for bi in range(t, blen):
                    img[pos] = block_mat[ci, bi]
                    pos += 1
                depth += 1
                letter_at[depth] = c
                img_len_at[depth] = pos
                next_code[depth + 1] = 2
                if pos > maxout[depth]:
                    maxout[depth] = pos
                pushed = True
        if not pushed:
            if depth == 0:
                break
            t = undo_cnt[depth]
            base = img_len_at[depth - 1]
            for j in range(t):
                img[base - t + j] = undo[depth, j]
            depth -= 1


def growth_scan(nletters, radius, block_mat, block_len):
    maxout = np.zeros(radius + 1, dtype=np.int64)
    _growth_scan(nletters, radius, block_mat, block_len, maxout)
    return maxout

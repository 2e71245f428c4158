"""Cross-backend agreement of the array kernels against the Python reference."""

import random

import numpy as np
import pytest

from freenorm import GroupContext
from freenorm._kernels import encoding, np_impl, py_impl
from freenorm import _kernels

from conftest import random_reduced_word

nb_impl = pytest.importorskip("freenorm._kernels.nb_impl")


@pytest.fixture(scope="module")
def word_batch():
    ctx = GroupContext.parse("a|b")
    rng = random.Random(42)
    left = [random_reduced_word(ctx, rng.randrange(0, 10), rng) for _ in range(800)]
    right = [random_reduced_word(ctx, rng.randrange(0, 10), rng) for _ in range(800)]
    return ctx, left, right


def test_encoding_roundtrip(word_batch):
    ctx, left, _ = word_batch
    for w in left:
        codes = encoding.word_to_codes(w)
        assert encoding.codes_to_word(ctx, codes) == w


def test_invert_rows(word_batch):
    ctx, left, _ = word_batch
    mat, lengths = encoding.pack_words(left)
    inv = encoding.invert_rows(mat, lengths)
    for i, w in enumerate(left):
        assert encoding.codes_to_word(ctx, inv[i, : lengths[i]]) == w.inverse()


def test_reduce_concat_matches_reference(word_batch):
    ctx, left, right = word_batch
    lmat, llen = encoding.pack_words(left)
    rmat, rlen = encoding.pack_words(right)
    out_np, len_np = np_impl.reduce_concat_pairs(lmat, llen, rmat, rlen)
    out_nb, len_nb = nb_impl.reduce_concat_pairs(lmat, llen, rmat, rlen)
    for i, (u, v) in enumerate(zip(left, right)):
        expected = list(encoding.word_to_codes(u * v))
        assert list(out_np[i, : len_np[i]]) == expected
        assert list(out_nb[i, : len_nb[i]]) == expected


def test_conjugate_lengths_matches_reference(word_batch):
    ctx, left, right = word_batch
    vmat, vlen = encoding.pack_words(right)
    for gw in left[:25]:
        g = encoding.word_to_codes(gw)
        ref = np.array([len(v.inverse() * gw * v) for v in right])
        got_np = np_impl.conjugate_lengths(g, vmat, vlen)
        got_nb = nb_impl.conjugate_lengths(g, vmat, vlen)
        assert np.array_equal(got_np, ref)
        assert np.array_equal(got_nb, ref)


def test_conjugate_lengths_edge_cases():
    ctx = GroupContext.parse("a|b")
    g = ctx.word("a.b^-1.a^2")
    cases = [ctx.identity, g, g.inverse(), g ** 2, ctx.word("a"), ctx.word("a^-1"),
             ctx.word("b.a"), g * ctx.word("b")]
    vmat, vlen = encoding.pack_words(cases)
    for impl in (np_impl, nb_impl):
        got = impl.conjugate_lengths(encoding.word_to_codes(g), vmat, vlen)
        assert list(got) == [len(v.inverse() * g * v) for v in cases]
    # identity g: every conjugate is the identity
    for impl in (np_impl, nb_impl):
        got = impl.conjugate_lengths(encoding.word_to_codes(ctx.identity), vmat, vlen)
        assert list(got) == [0] * len(cases)


def test_ball_matrix_matches_enumeration():
    for spec, radius in [("a|b", 5), ("x|y|a", 3), ("t", 6)]:
        ctx = GroupContext.parse(spec)
        mat, lengths = encoding.ball_matrix(ctx.rank, radius)
        words = list(ctx.enumerate_ball(radius))
        assert mat.shape[0] == len(words)
        for i, w in enumerate(words):
            assert encoding.codes_to_word(ctx, mat[i, : lengths[i]]) == w


def test_ball_matrix_counts_to_radius_eight():
    # closed-form ball sizes hold out to radius 8 in both working ranks
    for rank, spec in [(2, "a|b"), (3, "x|y|a")]:
        ctx = GroupContext.parse(spec)
        for r in (7, 8):
            mat, lengths = encoding.ball_matrix(rank, r)
            assert mat.shape[0] == ctx.ball_count(r)
            assert int(lengths.max()) == r


def test_aggregate_rows_sums_and_sorts():
    ctx = GroupContext.parse("a|b")
    words = [ctx.word(t) for t in ["a", "b", "a", "e", "a", "b^-1"]]
    mat, lengths = encoding.pack_words(words)
    coeffs = np.array([1, 2, 3, 4, 7, 5], dtype=np.int64)
    m, l, c = np_impl.aggregate_rows(mat, lengths, coeffs)
    decoded = [str(encoding.codes_to_word(ctx, m[i, : l[i]])) for i in range(len(l))]
    assert decoded == ["e", "a", "b", "b^-1"]
    assert list(c) == [4, 11, 2, 5]


def test_aggregate_prunes_exact_zero():
    ctx = GroupContext.parse("a|b")
    words = [ctx.word("a"), ctx.word("a")]
    mat, lengths = encoding.pack_words(words)
    m, l, c = np_impl.aggregate_rows(mat, lengths, np.array([7, -7], dtype=np.int64))
    assert len(l) == 0


def test_growth_scan_backends_agree(rank3):
    from freenorm.selfless import build_retraction

    ret = build_retraction(rank3, rank3.word("x"), 2)
    blocks = ret.letter_blocks()
    ref = py_impl.growth_scan(2 * rank3.rank, 4, blocks)
    block_mat = np.zeros((len(blocks), max(len(b) for b in blocks)), dtype=encoding.CODE_DTYPE)
    block_len = np.zeros(len(blocks), dtype=np.int64)
    for i, b in enumerate(blocks):
        block_mat[i, : len(b)] = b
        block_len[i] = len(b)
    got_np = list(np_impl.growth_scan(2 * rank3.rank, 4, block_mat, block_len))
    got_nb = list(nb_impl.growth_scan(2 * rank3.rank, 4, block_mat, block_len))
    assert [int(v) for v in got_np] == ref
    assert [int(v) for v in got_nb] == ref


def test_backend_selection(monkeypatch):
    _kernels.set_backend("numpy")
    try:
        assert _kernels.active_backend() == "numpy"
    finally:
        _kernels.set_backend(None)
    monkeypatch.setenv("FREENORM_KERNEL", "python")
    assert _kernels.active_backend() == "python"
    monkeypatch.setenv("FREENORM_KERNEL", "bogus")
    with pytest.raises(ValueError):
        _kernels.active_backend()

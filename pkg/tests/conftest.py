"""Shared fixtures and independent oracles for the test suite."""

import random
from collections import defaultdict
from fractions import Fraction

import pytest

from freenorm import GroupContext, Word
from freenorm.algebra import AlgebraElement


@pytest.fixture
def f2() -> GroupContext:
    return GroupContext.parse("a|b")


@pytest.fixture
def rank3() -> GroupContext:
    return GroupContext.parse("x|y|a")


def tree_walk_counts(k: int, length: int) -> int:
    """Closed walks of the given length at the root of the 2k-regular tree.

    Independent oracle: walk the distance-from-root chain (first-return
    recurrence), never touching the group algebra.
    """
    counts: dict[int, int] = {0: 1}
    for _ in range(length):
        nxt: dict[int, int] = defaultdict(int)
        for d, c in counts.items():
            if d == 0:
                nxt[1] += 2 * k * c
            else:
                nxt[d + 1] += (2 * k - 1) * c
                nxt[d - 1] += c
        counts = dict(nxt)
    return counts.get(0, 0)


def brute_product_l2_squared(x: AlgebraElement, y: AlgebraElement) -> Fraction:
    """||x . y||_2^2 summed over pairs, independent of the convolution path."""
    acc: dict[Word, Fraction] = {}
    for wx, cx in x.canonical_items():
        for wy, cy in y.canonical_items():
            w = wx * wy
            acc[w] = acc.get(w, Fraction(0)) + cx * cy
    return sum((c * c for c in acc.values()), Fraction(0))


def random_reduced_word(ctx: GroupContext, length: int, rng: random.Random) -> Word:
    letters: list[int] = []
    k = ctx.rank
    while len(letters) < length:
        cand = rng.randrange(1, k + 1) * rng.choice((1, -1))
        if letters and letters[-1] == -cand:
            continue
        letters.append(cand)
    return Word.from_letters(ctx, letters)


def random_element(
    ctx: GroupContext, radius: int, rng: random.Random, *, normalize_l1: bool = False
) -> AlgebraElement:
    words = list(ctx.enumerate_ball(radius))
    terms: dict[Word, Fraction] = {}
    for w in words:
        if rng.random() < 0.6:
            num = rng.randint(-5, 5)
            den = rng.randint(1, 4)
            if num:
                terms[w] = Fraction(num, den)
    if not terms:
        terms[words[rng.randrange(len(words))]] = Fraction(1)
    x = AlgebraElement(ctx, terms)
    if normalize_l1:
        x = (Fraction(1) / x.norms().l1) * x
    return x

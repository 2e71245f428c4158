"""Pure-Python reference implementations of the kernels.

Slow but dependency-free; the array paths are property-tested against these.
The growth scan here also serves as the fallback when the array paths are
disabled.
"""

from __future__ import annotations

import sys


def reduce_concat(u: list[int], v: list[int]) -> list[int]:
    k = 0
    lim = min(len(u), len(v))
    while k < lim and u[len(u) - 1 - k] == (v[k] ^ 1):
        k += 1
    return u[: len(u) - k] + v[k:]


def conjugate_length(g: list[int], v: list[int]) -> int:
    vinv = [c ^ 1 for c in reversed(v)]
    return len(reduce_concat(reduce_concat(vinv, g), v))


def growth_scan(nletters: int, radius: int, blocks: list[list[int]]) -> list[int]:
    """Max image length per ball level, by depth-first scan of reduced words."""
    maxout = [0] * (radius + 1)
    img: list[int] = []
    limit = sys.getrecursionlimit()
    if radius + 10 > limit:
        sys.setrecursionlimit(radius + 50)

    def visit(depth: int, last: int) -> None:
        for c in range(2, 2 + nletters):
            if depth > 0 and c == (last ^ 1):
                continue
            block = blocks[c - 2]
            bi = 0
            popped: list[int] = []
            while bi < len(block) and img and img[-1] == (block[bi] ^ 1):
                popped.append(img.pop())
                bi += 1
            appended = len(block) - bi
            img.extend(block[bi:])
            if len(img) > maxout[depth + 1]:
                maxout[depth + 1] = len(img)
            if depth + 1 < radius:
                visit(depth + 1, c)
            if appended:
                del img[len(img) - appended :]
            img.extend(reversed(popped))

    if radius >= 1:
        visit(0, 0)
    return maxout

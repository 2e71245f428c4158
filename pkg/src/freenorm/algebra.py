"""Sparse exact-rational group-algebra elements.

An element is a finite map from reduced words to nonzero ``Fraction``
coefficients.  Everything here is exact: no floating point enters any code
path, so equalities such as the layered l2 identities downstream can be
asserted bit-for-bit.

Convolution (the product under the left regular representation) has three
interchangeable inner loops: a numba kernel, a vectorized numpy kernel, and
a pure-Python dictionary fold.  The array paths clear denominators and run
on int64 with an a-priori overflow bound; whenever the bound cannot certify
int64 safety the element silently takes the big-integer Python path.  All
paths return identical canonical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import (
    BudgetExceededError,
    CoefficientLimitError,
    ContextMismatchError,
    HypothesisViolationError,
    ParseError,
)
from .words import GroupContext, Word, parse_word

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class LayeredL2Profile:
    """Squared l2 mass of each word-length layer of an element."""

    layers: tuple[tuple[int, Fraction], ...]  # (word length, ||x_k||_2^2), k ascending

    @property
    def total(self) -> Fraction:
        return sum((v for _, v in self.layers), Fraction(0))

    @property
    def radius(self) -> int:
        return self.layers[-1][0] if self.layers else 0

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.layers)


@dataclass(frozen=True)
class NormData:
    """Exact l1, squared l2, trace, plus the layered l2 profile."""

    l1: Fraction
    l2_squared: Fraction
    trace: Fraction
    layered: LayeredL2Profile


class AlgebraElement:
    """An element of the rational group algebra, kept in canonical form."""

    __slots__ = ("ctx", "_terms")

    def __init__(self, ctx: GroupContext, terms: Mapping[Word, Fraction] | None = None):
        self.ctx = ctx
        clean: dict[Word, Fraction] = {}
        if terms:
            for w, c in terms.items():
                if w.ctx != ctx:
                    raise ContextMismatchError("term word belongs to a different context")
                c = Fraction(c)
                if c:
                    clean[w] = c
        self._terms = clean

    # -- constructors ----------------------------------------------------------

    @classmethod
    def _raw(cls, ctx: GroupContext, terms: dict[Word, Fraction]) -> "AlgebraElement":
        """Trusted fast path: terms must already be canonical (Fraction values,
        no zeros, words in ctx)."""
        self = object.__new__(cls)
        self.ctx = ctx
        self._terms = terms
        return self

    @classmethod
    def zero(cls, ctx: GroupContext) -> "AlgebraElement":
        return cls(ctx)

    @classmethod
    def from_word(cls, w: Word, coeff: Fraction | int = 1) -> "AlgebraElement":
        return cls(w.ctx, {w: Fraction(coeff)})

    # -- basic views -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, w: Word) -> Fraction:
        return self._terms.get(w, Fraction(0))

    def support(self) -> list[Word]:
        return sorted(self._terms, key=Word.sort_key)

    def canonical_items(self) -> list[tuple[Word, Fraction]]:
        return [(w, self._terms[w]) for w in self.support()]

    def radius(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and self.ctx == other.ctx
            and self._terms == other._terms
        )

    __hash__ = None  # type: ignore[assignment]

    # -- linear structure --------------------------------------------------------

    def _require_same_context(self, other: "AlgebraElement") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatchError("elements live in different contexts")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return combine(self, Fraction(1), other)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return combine(self, Fraction(-1), other)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement._raw(self.ctx, {w: -c for w, c in self._terms.items()})

    def __rmul__(self, scalar) -> "AlgebraElement":
        if isinstance(scalar, (int, Fraction)):
            s = Fraction(scalar)
            if not s:
                return AlgebraElement.zero(self.ctx)
            return AlgebraElement._raw(self.ctx, {w: s * c for w, c in self._terms.items()})
        return NotImplemented

    def __mul__(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        if isinstance(other, (int, Fraction)):
            return self.__rmul__(other)
        return NotImplemented

    # -- *-algebra structure -----------------------------------------------------

    def adjoint(self) -> "AlgebraElement":
        """g -> g^-1 termwise; coefficients are rational, so no conjugation."""
        return AlgebraElement._raw(self.ctx, {w.inverse(): c for w, c in self._terms.items()})

    def norms(self) -> NormData:
        l1 = Fraction(0)
        l2 = Fraction(0)
        layers: dict[int, Fraction] = {}
        for w, c in self._terms.items():
            l1 += abs(c)
            sq = c * c
            l2 += sq
            k = len(w)
            layers[k] = layers.get(k, Fraction(0)) + sq
        trace = self._terms.get(self.ctx.identity, Fraction(0))
        profile = LayeredL2Profile(tuple(sorted(layers.items())))
        return NormData(l1=l1, l2_squared=l2, trace=trace, layered=profile)

    def power(self, m: int, **kwargs) -> "AlgebraElement":
        return power(self, m, **kwargs)

    # -- text ---------------------------------------------------------------------

    def serialize(self) -> str:
        """Canonical text: ShortLex term order, coefficients in lowest terms.

        This string is the bit-exact cache key input.
        """
        items = self.canonical_items()
        if not items:
            return "0"
        parts: list[str] = []
        for i, (w, c) in enumerate(items):
            mag = -c if c < 0 else c
            coeff = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            term = f"{coeff}*{w}"
            if i == 0:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.serialize()

    def __repr__(self) -> str:
        return f"AlgebraElement({self.serialize()!r})"


# -- operations -----------------------------------------------------------------


def combine(x: AlgebraElement, c: Fraction | int, y: AlgebraElement) -> AlgebraElement:
    """x + c*y, exact, with zero coefficients pruned."""
    x._require_same_context(y)
    c = Fraction(c)
    acc = dict(x._terms)
    if c:
        for w, v in y._terms.items():
            nv = acc.get(w, Fraction(0)) + c * v
            if nv:
                acc[w] = nv
            else:
                acc.pop(w, None)
    return AlgebraElement._raw(x.ctx, acc)


def _convolve_python(x: AlgebraElement, y: AlgebraElement) -> dict[Word, Fraction]:
    acc: dict[Word, Fraction] = {}
    zero = Fraction(0)
    for wx, cx in x._terms.items():
        for wy, cy in y._terms.items():
            w = wx * wy
            nv = acc.get(w, zero) + cx * cy
            if nv:
                acc[w] = nv
            else:
                acc.pop(w, None)
    return acc


def _int64_plan(x: AlgebraElement, y: AlgebraElement):
    """Clear denominators; return int arrays when the result provably fits int64."""
    xs = x.canonical_items()
    ys = y.canonical_items()
    dx = math.lcm(*(c.denominator for _, c in xs))
    dy = math.lcm(*(c.denominator for _, c in ys))
    nx = [int(c * dx) for _, c in xs]
    ny = [int(c * dy) for _, c in ys]
    mx = max(abs(v) for v in nx)
    my = max(abs(v) for v in ny)
    # each output coefficient is a sum of at most min(|supp x|, |supp y|)
    # pair products, so this bounds every partial and final sum
    if mx * my * min(len(nx), len(ny)) >= _INT64_SAFE:
        return None
    return xs, ys, np.array(nx, dtype=np.int64), np.array(ny, dtype=np.int64), dx, dy


def _convolve_arrays(x: AlgebraElement, y: AlgebraElement, plan, chunk_pairs: int) -> dict[Word, Fraction]:
    xs, ys, nx, ny, dx, dy = plan
    lmat, llen = _kernels.pack_words([w for w, _ in xs])
    rmat, rlen = _kernels.pack_words([w for w, _ in ys])
    n1, n2 = len(xs), len(ys)
    rows_per_chunk = max(1, chunk_pairs // max(n2, 1))
    pieces: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    for lo in range(0, n1, rows_per_chunk):
        hi = min(lo + rows_per_chunk, n1)
        li = np.repeat(np.arange(lo, hi), n2)
        ri = np.tile(np.arange(n2), hi - lo)
        out, outlen = _kernels.reduce_concat_pairs(lmat[li], llen[li], rmat[ri], rlen[ri])
        coeffs = nx[li] * ny[ri]
        pieces.append(_kernels.aggregate_rows(out, outlen, coeffs))
    if len(pieces) == 1:
        mat, lens, coeffs = pieces[0]
    else:
        width = max(p[0].shape[1] for p in pieces)
        mats = [
            np.pad(p[0], ((0, 0), (0, width - p[0].shape[1]))) if p[0].shape[1] < width else p[0]
            for p in pieces
        ]
        mat, lens, coeffs = _kernels.aggregate_rows(
            np.vstack(mats), np.concatenate([p[1] for p in pieces]), np.concatenate([p[2] for p in pieces])
        )
    den = dx * dy
    ctx = x.ctx
    return {
        _kernels.codes_to_word(ctx, mat[i, : lens[i]]): Fraction(int(coeffs[i]), den)
        for i in range(len(lens))
    }


def _check_coeff_cap(terms: Mapping[Word, Fraction], cap: int | None) -> None:
    if cap is None:
        return
    worst = 0
    for c in terms.values():
        worst = max(worst, c.numerator.bit_length(), c.denominator.bit_length())
        if worst > cap:
            raise CoefficientLimitError(
                f"coefficient size reached {worst} bits, cap is {cap}",
                predicted=worst,
                budget=cap,
            )


def convolve(
    x: AlgebraElement,
    y: AlgebraElement,
    *,
    budget: int | None = None,
    backend: str | None = None,
    coeff_bit_cap: int | None = None,
    chunk_pairs: int = 2_000_000,
) -> AlgebraElement:
    """Exact convolution product; bit-identical across kernel backends.

    The predicted term count ``min(|B(r1+r2)|, |supp x|*|supp y|)`` is checked
    against ``budget`` before any allocation.
    """
    x._require_same_context(y)
    if not x._terms or not y._terms:
        return AlgebraElement.zero(x.ctx)
    n_pairs = len(x._terms) * len(y._terms)
    predicted = min(x.ctx.ball_count(x.radius() + y.radius()), n_pairs)
    if budget is not None and predicted > budget:
        raise BudgetExceededError(
            f"convolution predicts up to {predicted} terms, budget is {budget}",
            predicted=predicted,
            budget=budget,
        )
    chosen = backend or _kernels.active_backend()
    terms: dict[Word, Fraction] | None = None
    if chosen != "python":
        plan = _int64_plan(x, y)
        if plan is not None:
            terms = _convolve_arrays(x, y, plan, chunk_pairs)
    if terms is None:
        terms = _convolve_python(x, y)
    _check_coeff_cap(terms, coeff_bit_cap)
    return AlgebraElement._raw(x.ctx, terms)


def power(
    x: AlgebraElement,
    m: int,
    *,
    budget: int | None = None,
    backend: str | None = None,
    coeff_bit_cap: int | None = None,
    cache=None,
) -> AlgebraElement:
    """m-th convolution power by repeated squaring; m must be a power of two.

    ``cache``, when given, must offer ``load(x, m) -> AlgebraElement | None``
    and ``store(x, m, value)``; every intermediate square is cached.
    """
    if m < 1 or m & (m - 1):
        raise HypothesisViolationError(f"power schedule requires m a power of two, got {m}")
    result = x
    k = 1
    while k < m:
        k *= 2
        cached = cache.load(x, k) if cache is not None else None
        if cached is not None:
            result = cached
            continue
        result = convolve(
            result, result, budget=budget, backend=backend, coeff_bit_cap=coeff_bit_cap
        )
        if cache is not None:
            cache.store(x, k, result)
    return result


def canonical_hash(x: AlgebraElement) -> str:
    """sha256 of the canonical serialization, prefixed by the group spec."""
    import hashlib

    payload = f"{x.ctx.spec_string()}\n{x.serialize()}".encode()
    return hashlib.sha256(payload).hexdigest()


# -- parsing ----------------------------------------------------------------------


def _split_terms(text: str) -> list[tuple[int, str, int]]:
    """Split on top-level +/-.

    A sign directly after '^' binds to the exponent, and one directly after
    another sign binds to the coefficient (``+ -1*a``), so neither splits.
    """
    chunks: list[tuple[int, str, int]] = []
    sign = 1
    start = 0
    prev_nonspace = ""
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "+-" and prev_nonspace not in ("", "^", "+", "-"):
            chunks.append((sign, text[start:i], start))
            sign = 1 if ch == "+" else -1
            start = i + 1
        if not ch.isspace():
            prev_nonspace = ch
        i += 1
    chunks.append((sign, text[start:], start))
    return chunks


def parse_element(text: str, ctx: GroupContext) -> AlgebraElement:
    """Parse the element grammar, e.g. ``1/2*e + 1/2*x + -1*b^3.x.b^-3``.

    Words reduce on ingest and equal words merge exactly, so ``2*a + -2*a``
    is the zero element.
    """
    stripped = text.strip()
    if stripped == "0":
        return AlgebraElement.zero(ctx)
    if not stripped:
        raise ParseError("empty element text", text)
    acc: dict[Word, Fraction] = {}
    for sign, chunk, offset in _split_terms(text):
        body = chunk.strip()
        if not body:
            raise ParseError("empty term", text, offset)
        coeff = Fraction(sign)
        while body[:1] in ("+", "-"):
            if body[0] == "-":
                coeff = -coeff
            body = body[1:].lstrip()
        if "*" in body:
            cpart, _, wpart = body.partition("*")
            cpart = cpart.strip()
            try:
                coeff *= Fraction(cpart)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad rational coefficient {cpart!r}", text, offset) from None
            body = wpart.strip()
        try:
            w = parse_word(body, ctx)
        except ParseError as exc:
            raise ParseError(f"bad word in term: {exc}", text, offset) from None
        nv = acc.get(w, Fraction(0)) + coeff
        if nv:
            acc[w] = nv
        else:
            acc.pop(w, None)
    return AlgebraElement._raw(ctx, acc)

"""Reduced-word arithmetic in free products of finitely generated free groups.

A context is a free product of named free factors.  Since a free product of
free groups is again free on the combined alphabet, every element has a
unique freely reduced normal form, which makes the word problem (and hence
all downstream exact computations) trivial to decide.

Words are stored syllable-compressed: a tuple of ``(generator_index,
exponent)`` pairs with nonzero exponents and distinct adjacent generators.
Word length is the letter count ``sum(|exponent|)``, i.e. the graph distance
from the identity in the Cayley graph on the combined alphabet.

Text grammar (used by the CLI and all serializations)::

    word   := "e" | syllable ("." syllable)*
    syllable := name ("^" nonzero-int)?
    group  := factor ("|" factor)*          e.g. "x|y|a"
    factor := name ("," name)*

ShortLex order: shorter words first; words of equal length compare letter by
letter with ``g < g^-1 < h < h^-1 < ...`` following generator order.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceededError, ContextMismatchError, HypothesisViolationError, ParseError

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT_RE = re.compile(r"[+-]?\d+")


class GroupContext:
    """A free product of finitely generated free factors.

    ``factors`` is an ordered tuple of tuples of generator names; the
    concatenation of all factor alphabets is the combined generating set.
    Generator names must be globally unique and every factor nonempty.
    """

    __slots__ = ("factors", "alphabet", "factor_of", "_index", "_identity")

    def __init__(self, factors: Sequence[Sequence[str]]):
        factors = tuple(tuple(f) for f in factors)
        if not factors:
            raise ValueError("a group context needs at least one factor")
        seen: dict[str, int] = {}
        for fi, factor in enumerate(factors):
            if not factor:
                raise ValueError(f"factor {fi} is empty")
            for name in factor:
                if not _NAME_RE.fullmatch(name):
                    raise ValueError(f"invalid generator name {name!r}")
                if name in seen:
                    raise ValueError(f"duplicate generator name {name!r}")
                seen[name] = fi
        self.factors = factors
        self.alphabet = tuple(n for f in factors for n in f)
        self.factor_of = {n: seen[n] for n in self.alphabet}
        self._index = {n: i for i, n in enumerate(self.alphabet)}
        self._identity = Word(self, ())

    @classmethod
    def parse(cls, spec: str) -> "GroupContext":
        """Build a context from a spec string such as ``"x|y|a"``."""
        factors = []
        for part in spec.split("|"):
            names = [n.strip() for n in part.split(",")]
            if any(not n for n in names):
                raise ParseError("empty generator name in group spec", spec)
            factors.append(names)
        return cls(factors)

    def spec_string(self) -> str:
        return "|".join(",".join(f) for f in self.factors)

    @property
    def rank(self) -> int:
        return len(self.alphabet)

    @property
    def identity(self) -> "Word":
        return self._identity

    def generator(self, name: str) -> "Word":
        if name not in self._index:
            raise ValueError(f"unknown generator {name!r}")
        return Word(self, ((self._index[name], 1),))

    def generator_index(self, name: str) -> int:
        return self._index[name]

    def word(self, text: str) -> "Word":
        """Parse a word in the text grammar; the result is freely reduced."""
        return parse_word(text, self)

    def ball_count(self, radius: int) -> int:
        """Closed-form size of the radius-``radius`` ball.

        For combined rank ``k >= 2`` this is ``1 + 2k((2k-1)^r - 1)/(2k-2)``;
        rank 1 gives ``2r + 1``.
        """
        k = self.rank
        if radius < 0:
            return 0
        if k == 1:
            return 2 * radius + 1
        return 1 + 2 * k * ((2 * k - 1) ** radius - 1) // (2 * k - 2)

    def sphere_count(self, radius: int) -> int:
        if radius == 0:
            return 1
        k = self.rank
        return 2 * k * (2 * k - 1) ** (radius - 1)

    def enumerate_ball(self, radius: int, budget: int | None = None) -> Iterator["Word"]:
        """Yield every word of length <= radius in ShortLex order.

        The count is checked against ``budget`` in closed form before any
        enumeration happens.
        """
        total = self.ball_count(radius)
        if budget is not None and total > budget:
            raise BudgetExceededError(
                f"ball of radius {radius} holds {total} words, budget is {budget}",
                predicted=total,
                budget=budget,
            )
        k = self.rank
        level: list[Word] = [self._identity]
        yield self._identity
        for _ in range(radius):
            nxt: list[Word] = []
            for w in level:
                syls = w.syllables
                last = syls[-1][0] if syls else -1
                last_sign = syls[-1][1] > 0 if syls else True
                for code in range(2 * k):
                    g, positive = code >> 1, code & 1 == 0
                    # skip the letter that would cancel against the tail
                    if syls and g == last and positive != last_sign:
                        continue
                    nxt.append(w._append_letter(g, 1 if positive else -1))
            level = nxt
            yield from level

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupContext) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        return f"GroupContext({self.spec_string()!r})"


def _check_same_context(a: "Word", b: "Word") -> None:
    if a.ctx != b.ctx:
        raise ContextMismatchError(f"words live in different contexts: {a.ctx!r} vs {b.ctx!r}")


class Word:
    """A freely reduced word; immutable and hashable.

    ``syllables`` is the canonical compressed form.  ``len(w)`` is the word
    length (letter count), so ``len`` agrees with the Cayley-graph distance
    to the identity.
    """

    __slots__ = ("ctx", "syllables", "_hash", "_len")

    def __init__(self, ctx: GroupContext, syllables: tuple[tuple[int, int], ...]):
        self.ctx = ctx
        self.syllables = syllables
        self._hash: int | None = None
        self._len: int | None = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_letters(cls, ctx: GroupContext, letters: Iterable[int]) -> "Word":
        """Build from signed generator indices (``i+1`` / ``-(i+1)``), reducing."""
        out: list[tuple[int, int]] = []
        for letter in letters:
            if letter == 0:
                raise ValueError("0 is not a letter")
            g, e = abs(letter) - 1, (1 if letter > 0 else -1)
            if out and out[-1][0] == g:
                ne = out[-1][1] + e
                if ne == 0:
                    out.pop()
                else:
                    out[-1] = (g, ne)
            else:
                out.append((g, e))
        return cls(ctx, tuple(out))

    def _append_letter(self, g: int, sign: int) -> "Word":
        syls = self.syllables
        if syls and syls[-1][0] == g:
            ne = syls[-1][1] + sign
            if ne == 0:
                return Word(self.ctx, syls[:-1])
            return Word(self.ctx, syls[:-1] + ((g, ne),))
        return Word(self.ctx, syls + ((g, sign),))

    # -- group operations -----------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        _check_same_context(self, other)
        if not self.syllables:
            return other
        if not other.syllables:
            return self
        left = list(self.syllables)
        for g, e in other.syllables:
            if left and left[-1][0] == g:
                ne = left[-1][1] + e
                if ne == 0:
                    left.pop()
                else:
                    left[-1] = (g, ne)
            else:
                left.append((g, e))
        return Word(self.ctx, tuple(left))

    def inverse(self) -> "Word":
        return Word(self.ctx, tuple((g, -e) for g, e in reversed(self.syllables)))

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return self.ctx.identity
        base = self if n > 0 else self.inverse()
        result = self.ctx.identity
        n = abs(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __len__(self) -> int:
        if self._len is None:
            self._len = sum(abs(e) for _, e in self.syllables)
        return self._len

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    # -- ordering and identity ------------------------------------------------

    def letters(self) -> tuple[int, ...]:
        """Signed generator indices, one per letter (``i+1`` / ``-(i+1)``)."""
        out: list[int] = []
        for g, e in self.syllables:
            out.extend([g + 1 if e > 0 else -(g + 1)] * abs(e))
        return tuple(out)

    def letter_ranks(self) -> tuple[int, ...]:
        """Letters as ShortLex ranks: generator ``i`` is ``2i``, its inverse ``2i+1``."""
        out: list[int] = []
        for g, e in self.syllables:
            out.extend([2 * g if e > 0 else 2 * g + 1] * abs(e))
        return tuple(out)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self), self.letter_ranks())

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Word)
            and self.syllables == other.syllables
            and self.ctx == other.ctx
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.syllables)
        return self._hash

    def __lt__(self, other: "Word") -> bool:
        _check_same_context(self, other)
        return self.sort_key() < other.sort_key()

    # -- structure ------------------------------------------------------------

    def factor_support(self) -> set[int]:
        """Indices of the free factors whose generators occur in the word."""
        return {self.ctx.factor_of[self.ctx.alphabet[g]] for g, _ in self.syllables}

    def cyclic_reduce(self) -> tuple["Word", "Word"]:
        """Return ``(core, conjugator)`` with ``self = conjugator * core * conjugator^-1``.

        The core is cyclically reduced, hence of minimal length in the
        conjugacy class.
        """
        syls = list(self.syllables)
        conj: list[tuple[int, int]] = []
        while len(syls) >= 2 and syls[0][0] == syls[-1][0] and (syls[0][1] > 0) != (syls[-1][1] > 0):
            g = syls[0][0]
            e1, e2 = syls[0][1], syls[-1][1]
            s = 1 if e1 > 0 else -1
            t = min(abs(e1), abs(e2))
            conj.append((g, s * t))
            e1 -= s * t
            e2 += s * t
            if e1 == 0:
                syls.pop(0)
            else:
                syls[0] = (g, e1)
            if e2 == 0:
                syls.pop(-1)
            else:
                syls[-1] = (g, e2)
            if len(syls) == 1:
                break
        core = Word(self.ctx, tuple(syls))
        conjugator = Word(self.ctx, tuple(conj))
        return core, conjugator

    def primitive_root(self) -> tuple["Word", int]:
        """Return ``(root, exponent)`` with ``self == root ** exponent``
        and the root not a proper power.  The identity has no root."""
        if self.is_identity:
            raise HypothesisViolationError("the identity has no primitive root")
        core, conj = self.cyclic_reduce()
        letters = list(core.letters())
        n = len(letters)
        for p in range(1, n + 1):
            if n % p:
                continue
            if letters == letters[:p] * (n // p):
                root_core = Word.from_letters(self.ctx, letters[:p])
                root = conj * root_core * conj.inverse()
                return root, n // p
        raise AssertionError("unreachable: every word is a power of itself")

    # -- text -----------------------------------------------------------------

    def __str__(self) -> str:
        if not self.syllables:
            return "e"
        parts = []
        for g, e in self.syllables:
            name = self.ctx.alphabet[g]
            parts.append(name if e == 1 else f"{name}^{e}")
        return ".".join(parts)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


# -- module-level operation aliases -------------------------------------------


def multiply(w1: Word, w2: Word) -> Word:
    """Canonical reduced form of the concatenation ``w1 w2``."""
    return w1 * w2


def invert(w: Word) -> Word:
    return w.inverse()


def word_length(w: Word) -> int:
    return len(w)


def enumerate_ball(ctx: GroupContext, radius: int, budget: int | None = None) -> Iterator[Word]:
    return ctx.enumerate_ball(radius, budget=budget)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    return w.cyclic_reduce()


def primitive_root(w: Word) -> tuple[Word, int]:
    return w.primitive_root()


# -- parsing -------------------------------------------------------------------


def parse_word(text: str, ctx: GroupContext) -> Word:
    """Parse the word grammar; reduction happens on ingest, so e.g.
    ``a.a^-1`` parses to the identity."""
    s = text.strip()
    if s == "e":
        return ctx.identity
    if not s:
        raise ParseError("empty word (use 'e' for the identity)", text)
    letters: list[int] = []
    pos = 0
    first = True
    while pos < len(s):
        if not first:
            if s[pos] != ".":
                raise ParseError("expected '.' between syllables", text, pos)
            pos += 1
        first = False
        m = _NAME_RE.match(s, pos)
        if not m:
            raise ParseError("expected a generator name", text, pos)
        name = m.group(0)
        if name not in ctx._index:
            raise ParseError(f"unknown generator {name!r}", text, pos)
        pos = m.end()
        exp = 1
        if pos < len(s) and s[pos] == "^":
            pos += 1
            mi = _INT_RE.match(s, pos)
            if not mi:
                raise ParseError("expected an integer exponent after '^'", text, pos)
            exp = int(mi.group(0))
            if exp == 0:
                raise ParseError("zero exponent is not a syllable", text, pos)
            pos = mi.end()
        g = ctx._index[name] + 1
        letters.extend([g if exp > 0 else -g] * abs(exp))
    return Word.from_letters(ctx, letters)

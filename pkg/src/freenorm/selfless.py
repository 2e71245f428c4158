"""Retractions of a free product onto a subproduct, and their quantitative
behaviour: ball injectivity, fiber statistics, image growth, and the exact
l2-preservation that powers the norm-transfer experiment.

The canonical retraction family on ``G * H * <a>`` fixes ``G * H`` and sends
the distinguished letter ``a`` to ``h_n g h_n^-1``, where ``g`` is a chosen
nonidentity word in ``G`` and ``h_n`` is the ``(2n+1)``-st power of the first
generator of ``H`` (a canonical choice that makes runs reproducible; only
the length ``2n+1`` matters).  Custom, possibly non-injective substitution
maps are first-class so that degenerate behaviour is testable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import _kernels
from .algebra import AlgebraElement, canonical_hash, convolve
from .errors import BudgetExceededError, HypothesisViolationError
from .norms import haagerup_bound, p_squared
from .rounding import DEFAULT_BITS, RootBound
from .words import GroupContext, Word


class SubstitutionMap:
    """Endomorphism given by generator images (identity where unspecified)."""

    def __init__(self, ctx: GroupContext, images: Mapping[str, Word]):
        self.ctx = ctx
        self._images: dict[int, Word] = {}
        for name, img in images.items():
            gi = ctx.generator_index(name)
            if img.ctx != ctx:
                raise HypothesisViolationError("image word lives in a different context")
            self._images[gi] = img

    def image_of_generator(self, gi: int) -> Word:
        img = self._images.get(gi)
        if img is None:
            return Word(self.ctx, ((gi, 1),))
        return img

    def letter_blocks(self) -> list[list[int]]:
        """Per-letter image code sequences, indexed by letter code - 2."""
        blocks: list[list[int]] = []
        for gi in range(self.ctx.rank):
            img = self.image_of_generator(gi)
            codes = [2 * g + 2 if e > 0 else 2 * g + 3 for g, e in _expand(img)]
            blocks.append(codes)
            blocks.append([c ^ 1 for c in reversed(codes)])
        return blocks

    def apply_word(self, w: Word) -> Word:
        out = self.ctx.identity
        for gi, e in w.syllables:
            img = self.image_of_generator(gi)
            out = out * img ** e
        return out

    def apply_element(self, x: AlgebraElement) -> AlgebraElement:
        """Termwise pushforward; collisions merge by exact addition, so the
        l1 norm never grows."""
        acc: dict[Word, Fraction] = {}
        for w, c in x._terms.items():
            img = self.apply_word(w)
            nv = acc.get(img, Fraction(0)) + c
            if nv:
                acc[img] = nv
            else:
                acc.pop(img, None)
        return AlgebraElement._raw(self.ctx, acc)

    def apply(self, obj):
        if isinstance(obj, Word):
            return self.apply_word(obj)
        if isinstance(obj, AlgebraElement):
            return self.apply_element(obj)
        raise TypeError(f"cannot apply a substitution map to {type(obj).__name__}")

    def cache_key(self) -> tuple:
        return (
            self.ctx.spec_string(),
            tuple(sorted((gi, str(img)) for gi, img in self._images.items())),
        )


def _expand(w: Word):
    for g, e in w.syllables:
        step = 1 if e > 0 else -1
        for _ in range(abs(e)):
            yield g, step


class Retraction(SubstitutionMap):
    """The canonical retraction: fixes everything except ``a -> h_n g h_n^-1``."""

    def __init__(self, ctx: GroupContext, g: Word, n: int, h_factor: int, a_name: str):
        if g.is_identity:
            raise HypothesisViolationError("g must be a nonidentity word")
        support = g.factor_support()
        if len(support) != 1:
            raise HypothesisViolationError("g must lie in a single free factor")
        g_factor = support.pop()
        a_factor = ctx.factor_of[a_name]
        if a_factor == g_factor or a_factor == h_factor:
            raise HypothesisViolationError("the letter a must live in its own factor")
        if h_factor == g_factor:
            raise HypothesisViolationError("H must differ from the factor containing g")
        if n < 0:
            raise HypothesisViolationError("n must be nonnegative")
        h_gen = ctx.generator(ctx.factors[h_factor][0])
        h_n = h_gen ** (2 * n + 1)
        image = h_n * g * h_n.inverse()
        if len(image) != 2 * (2 * n + 1) + len(g):
            raise AssertionError("conjugated image unexpectedly reduced")
        super().__init__(ctx, {a_name: image})
        self.g = g
        self.n = n
        self.g_factor = g_factor
        self.h_factor = h_factor
        self.a_name = a_name
        self.h_n = h_n
        self.image_of_a = image

    def spec_string(self) -> str:
        return f"g={self.g};H={self.ctx.factors[self.h_factor][0]};n={self.n}"


def _default_roles(ctx: GroupContext, g: Word, h_factor: int | None, a_name: str | None):
    support = g.factor_support()
    if len(support) != 1:
        raise HypothesisViolationError("g must lie in a single free factor")
    g_factor = next(iter(support))
    if a_name is None:
        a_factor = len(ctx.factors) - 1
        if a_factor == g_factor:
            raise HypothesisViolationError("cannot pick a default letter a inside g's factor")
        a_name = ctx.factors[a_factor][0]
    a_factor = ctx.factor_of[a_name]
    if h_factor is None:
        for fi in range(len(ctx.factors)):
            if fi != g_factor and fi != a_factor:
                h_factor = fi
                break
        if h_factor is None:
            raise HypothesisViolationError("no factor left to play the role of H")
    return h_factor, a_name


def build_retraction(
    ctx: GroupContext, g: Word, n: int, *, h_factor: int | None = None, a_name: str | None = None
) -> Retraction:
    """Construct the retraction with ``h_n`` of length ``2n+1``.

    Role defaults: ``a`` is the first generator of the last factor, ``H`` the
    first factor distinct from both ``a``'s and ``g``'s.
    """
    h_factor, a_name = _default_roles(ctx, g, h_factor, a_name)
    return Retraction(ctx, g, n, h_factor, a_name)


@dataclass(frozen=True)
class RetractionFamily:
    """The indexed family n -> phi_n for a fixed choice of g, H and a."""

    ctx: GroupContext
    g: Word
    h_factor: int | None = None
    a_name: str | None = None

    def at(self, n: int) -> Retraction:
        return build_retraction(self.ctx, self.g, n, h_factor=self.h_factor, a_name=self.a_name)


def apply(ret: SubstitutionMap, obj):
    """Apply a retraction/substitution to a word or an algebra element."""
    return ret.apply(obj)


# -- ball scans ------------------------------------------------------------------


@dataclass
class InjectivityReport:
    radius: int
    ball_size: int
    collisions: list[tuple[Word, Word]]
    max_fiber: int

    @property
    def injective(self) -> bool:
        return not self.collisions


def check_injectivity(
    ret: SubstitutionMap, radius: int, *, budget: int | None = None, max_collisions: int = 64
) -> InjectivityReport:
    """Exhaustive image-hashing scan of the radius ball.

    Collisions are found by dictionary lookup on canonical images, so hash
    collisions cannot cause false reports (equality is re-checked exactly).
    """
    seen: dict[Word, Word] = {}
    fibers: Counter = Counter()
    collisions: list[tuple[Word, Word]] = []
    count = 0
    for w in ret.ctx.enumerate_ball(radius, budget=budget):
        count += 1
        img = ret.apply_word(w)
        fibers[img] += 1
        if img in seen:
            if len(collisions) < max_collisions:
                collisions.append((seen[img], w))
        else:
            seen[img] = w
    max_fiber = max(fibers.values()) if fibers else 0
    return InjectivityReport(radius, count, collisions, max_fiber)


@dataclass
class FiberReport:
    radius: int
    ball_size: int
    max_multiplicity: int
    histogram: dict[int, int]  # fiber size -> number of fibers


def fiber_statistics(ret: SubstitutionMap, radius: int, *, budget: int | None = None) -> FiberReport:
    fibers: Counter = Counter()
    count = 0
    for w in ret.ctx.enumerate_ball(radius, budget=budget):
        count += 1
        fibers[ret.apply_word(w)] += 1
    sizes = Counter(fibers.values())
    max_mult = max(fibers.values()) if fibers else 0
    return FiberReport(radius, count, max_mult, dict(sorted(sizes.items())))


# -- growth ----------------------------------------------------------------------

_growth_cache: dict[tuple, list[int]] = {}


def _scan_map_growth(ret: SubstitutionMap, radius: int, budget: int | None = None) -> list[int]:
    """Max image length over each ball level of B(radius) under one map."""
    key = (ret.cache_key(), radius)
    hit = _growth_cache.get(key)
    if hit is not None:
        return hit
    total = ret.ctx.ball_count(radius)
    if budget is not None and total > budget:
        raise BudgetExceededError(
            f"growth scan over {total} words exceeds budget {budget}", predicted=total, budget=budget
        )
    per_level = _kernels.growth_scan(2 * ret.ctx.rank, radius, ret.letter_blocks())
    out = []
    best = 0
    for v in per_level:
        best = max(best, int(v))
        out.append(best)
    _growth_cache[key] = out
    return out


@dataclass
class GrowthProfile:
    """Measured growth f(n) = max image length over B(n).

    For the canonical retraction family the quadratic envelope
    ``n (4n + 3 + |g| - 1)`` is attached: a word of length n maps to at most
    n blocks of length 4n + 3 + |g| - 1 each (the image of the letter a under
    phi_n plus one fixed letter), so the measured values must sit below it.
    """

    values: list[int]  # index n = 0..radius_max
    envelope: list[int] | None = None  # same indexing; None for custom maps

    def f(self, n: int) -> int:
        return self.values[n]

    @property
    def radius_max(self) -> int:
        return len(self.values) - 1

    def within_envelope(self) -> bool:
        if self.envelope is None:
            return True
        return all(v <= e for v, e in zip(self.values, self.envelope))

    def ratios(self) -> list[float]:
        """f(n)^(1/n) for n >= 1 (display only, never used in certificates)."""
        return [self.values[n] ** (1.0 / n) for n in range(1, len(self.values))]


def growth_profile(
    family: RetractionFamily | SubstitutionMap, radius_max: int, *, budget: int | None = None
) -> GrowthProfile:
    """Family profile: f(n) uses phi_n on B(n); a single map is scanned once."""
    if isinstance(family, SubstitutionMap):
        return GrowthProfile(_scan_map_growth(family, radius_max, budget))
    values = [0]
    for n in range(1, radius_max + 1):
        values.append(_scan_map_growth(family.at(n), n, budget)[n])
    glen = len(family.g)
    envelope = [n * (4 * n + 3 + glen - 1) for n in range(radius_max + 1)]
    return GrowthProfile(values, envelope)


# -- the regrouped-product check ----------------------------------------------------


@dataclass
class ProductWitness:
    word: Word
    nontrivial: bool
    factors: int


def product_nontriviality(
    s_list: Sequence[Word], p_list: Sequence[int], ret: Retraction
) -> ProductWitness:
    """Compute s_1 t_1 ... s_{m-1} t_{m-1} s_m exactly, with t_i = h_n g^{p_i} h_n^-1.

    Hypothesis violations (zero exponents, trivial interior s_i, oversized
    s_i, or s_i meeting the letter a's factor) are reported, never silently
    accepted.
    """
    if len(s_list) != len(p_list) + 1:
        raise HypothesisViolationError(
            f"need one more s than p: got {len(s_list)} s and {len(p_list)} p"
        )
    n = ret.n
    a_factor = ret.ctx.factor_of[ret.a_name]
    for i, s in enumerate(s_list):
        if a_factor in s.factor_support():
            raise HypothesisViolationError(f"s_{i + 1} must lie in G*H (no letter from a's factor)")
        if len(s) > 2 * n:
            raise HypothesisViolationError(f"|s_{i + 1}| = {len(s)} exceeds 2n = {2 * n}")
        if 0 < i < len(s_list) - 1 and s.is_identity:
            raise HypothesisViolationError(f"interior s_{i + 1} must be nontrivial")
    for i, p in enumerate(p_list):
        if p == 0:
            raise HypothesisViolationError(f"exponent p_{i + 1} must be nonzero")
    product = s_list[0]
    for s, p in zip(s_list[1:], p_list):
        t = ret.h_n * ret.g ** p * ret.h_n.inverse()
        product = product * t * s
    nontrivial = not product.is_identity
    if not nontrivial and len(p_list) > 0:
        raise AssertionError("regrouped product collapsed under valid hypotheses")
    return ProductWitness(product, nontrivial, 2 * len(p_list) + 1)


# -- norm transfer ---------------------------------------------------------------


@dataclass
class TransferRow:
    m: int
    n: int
    c_m_source: Fraction  # ||(z* z)^m||_2^2
    c_m_image: Fraction  # ||(phi(z)* phi(z))^m||_2^2
    l2_equal: bool
    f_value: int  # measured growth of phi_n on B(2mR)
    factor: RootBound  # P(f(2mR))^(1/2m), rounded up
    upper_image: RootBound  # chain upper bound for ||lambda(phi(z))||
    lower_source: RootBound  # power-trick lower bound for ||lambda(z)||
    upper_image_direct: RootBound  # layered Haagerup on the image, for comparison
    within_epsilon: bool


@dataclass
class TransferReport:
    element_hash: str
    epsilon: Fraction
    radius: int
    rows: list[TransferRow]

    @property
    def all_equal(self) -> bool:
        return all(r.l2_equal for r in self.rows)


def transfer_experiment(
    z: AlgebraElement,
    epsilon: Fraction | int,
    schedule: Sequence[int],
    family: RetractionFamily,
    *,
    pairs: Sequence[tuple[int, int]] | None = None,
    budget: int | None = None,
    backend: str | None = None,
    bits: int = DEFAULT_BITS,
) -> TransferReport:
    """Push z through phi_n, verify exact l2 preservation and certify the chain.

    For each schedule entry m the default index is n = 2 m R with
    R = radius(z); explicit (m, n) pairs may be supplied instead, subject to
    n >= 2 m R.  The reported upper bound for the image norm is
    (P(f)^2 c_m)^(1/4m) with the exact radicand kept, so the chain identity
    radicand(upper) = P(f)^2 * radicand(lower) holds bit-exactly.
    """
    epsilon = Fraction(epsilon)
    if z.norms().l1 != 1:
        raise HypothesisViolationError("transfer experiment requires ||z||_1 = 1 exactly")
    radius = z.radius()
    if pairs is None:
        pairs = [(m, 2 * m * radius) for m in schedule]
    rows: list[TransferRow] = []
    for m, n in pairs:
        if m < 1 or m & (m - 1):
            raise HypothesisViolationError(f"schedule entries must be powers of two, got {m}")
        if n < 2 * m * radius:
            raise HypothesisViolationError(
                f"n = {n} is below the injectivity radius 2mR = {2 * m * radius}"
            )
        ret = family.at(n)
        image = ret.apply_element(z)
        y_src = convolve(z.adjoint(), z, budget=budget, backend=backend)
        y_img = convolve(image.adjoint(), image, budget=budget, backend=backend)
        pow_src = y_src.power(m, budget=budget, backend=backend)
        pow_img = y_img.power(m, budget=budget, backend=backend)
        c_src = pow_src.norms().l2_squared
        c_img = pow_img.norms().l2_squared
        equal = c_src == c_img
        if not equal:
            raise AssertionError(
                "exact l2 preservation failed although the support sits inside "
                "the injectivity ball; this indicates an arithmetic bug"
            )
        scan_radius = 2 * m * radius
        f_value = _scan_map_growth(ret, scan_radius, budget)[scan_radius]
        p2 = p_squared(f_value)
        factor = RootBound.upper(p2, 4 * m, bits)
        upper_image = RootBound.upper(p2 * c_src, 4 * m, bits)
        lower_source = RootBound.lower(c_src, 4 * m, bits)
        h = haagerup_bound(pow_img, bits)
        upper_direct = RootBound.upper(h.value, 2 * m, bits)
        rows.append(
            TransferRow(
                m=m,
                n=n,
                c_m_source=c_src,
                c_m_image=c_img,
                l2_equal=equal,
                f_value=f_value,
                factor=factor,
                upper_image=upper_image,
                lower_source=lower_source,
                upper_image_direct=upper_direct,
                within_epsilon=factor.rounded < 1 + epsilon,
            )
        )
    return TransferReport(
        element_hash=canonical_hash(z), epsilon=epsilon, radius=radius, rows=rows
    )

"""Cayley-tree geometry for the left translation action of a free group.

The tree is the Cayley graph on the combined alphabet with unit edges, so
everything is exact integer combinatorics:

* displacement ``[g]`` is the cyclically reduced length,
* stable length equals displacement (trees have no parabolic isometries for
  this action),
* the axis of ``g = u c u^-1`` is the line through ``u`` with vertices
  ``u * prefix_t(c^inf)`` (``t >= 0``) and ``u * prefix_t(c^-inf)``,
* nearest-point projections onto an axis are computed on a finite window
  with a monotone-tail certificate (tree distance to a line is convex, so
  once it grows on both sides of the window the gate cannot escape).

The constant cascade follows the admissible-path bookkeeping with the tree
specializations ``delta = 0`` and ``C' = 1``: quadratic gauges are supplied
by a configurable provider because the underlying Morse/projection
constants are only pinned up to a quadratic class; every output is an exact
rational, and only the theory-versus-practice comparisons depend on the
provider defaults.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _kernels
from .errors import BudgetExceededError, HypothesisViolationError, ParseError
from .words import Word


def translation_length(g: Word) -> int:
    """Displacement [g] = min over vertices of d(g v, v): the cyclically
    reduced length; 0 only for the identity."""
    core, _ = g.cyclic_reduce()
    return len(core)


@dataclass
class StableLengthReport:
    exact: int
    empirical: list[tuple[int, Fraction]]  # (n, d(g^n, e)/n)


def stable_length(g: Word, samples: Sequence[int]) -> StableLengthReport:
    """Exact stable length with the empirical sequence d(g^n, e)/n.

    On a tree the limit equals the displacement; the empirical terms differ
    from it by exactly 2|conjugator|/n.
    """
    if g.is_identity:
        raise HypothesisViolationError("stable length requires a nonidentity element")
    exact = translation_length(g)
    empirical = []
    for n in samples:
        if n < 1:
            raise HypothesisViolationError("sample exponents must be positive")
        empirical.append((n, Fraction(len(g ** n), n)))
    return StableLengthReport(exact, empirical)


def elementary_membership(g: Word, h: Word) -> bool:
    """h in E(g): in a free group E(g) is generated by g's primitive root."""
    if g.is_identity:
        raise HypothesisViolationError("E(g) requires g nonidentity")
    if h.is_identity:
        return True
    root_g, _ = g.primitive_root()
    root_h, _ = h.primitive_root()
    return root_h == root_g or root_h == root_g.inverse()


class Axis:
    """The g-invariant line L_g, parameterized by arc length through the
    conjugator vertex (parameter 0)."""

    def __init__(self, g: Word):
        if g.is_identity:
            raise HypothesisViolationError("the identity has no axis")
        core, conj = g.cyclic_reduce()
        self.g = g
        self.core = core
        self.conj = conj
        self._fwd = list(core.letters())
        self._bwd = [-c for c in reversed(self._fwd)]

    @property
    def period(self) -> int:
        return len(self._fwd)

    def vertex(self, t: int) -> Word:
        ray = self._fwd if t >= 0 else self._bwd
        k = abs(t)
        p = self.period
        letters = list(self.conj.letters())
        letters.extend(ray * (k // p))
        letters.extend(ray[: k % p])
        return Word.from_letters(self.g.ctx, letters)

    def translate_check(self, t: int) -> bool:
        """d(g . v_t, v_t) equals [g] on the axis."""
        v = self.vertex(t)
        return len(v.inverse() * self.g * v) == len(self.core)


def _distance(a: Word, b: Word) -> int:
    return len(a.inverse() * b)


def _project_vertex(z: Word, axis: Axis) -> tuple[int, int]:
    """Gate of z on the axis: (parameter, distance), certified by convexity.

    The optimal parameter satisfies |t| <= 2|z| + |conj|, because
    d(z, v_t) >= |v_t| - |z| = |conj| + |t| - |z| while the value at t = 0
    is at most |conj| + |z|.
    """
    w = 2 * len(z) + len(axis.conj) + 2
    best_t, best_d = 0, _distance(z, axis.vertex(0))
    for t in range(1, w + 1):
        for tt in (t, -t):
            d = _distance(z, axis.vertex(tt))
            if d < best_d or (d == best_d and abs(tt) < abs(best_t)):
                best_t, best_d = tt, d
    lo, hi = -w, w
    if not (_distance(z, axis.vertex(hi)) > best_d or best_t == hi):
        raise AssertionError("projection window certificate failed (upper end)")
    if not (_distance(z, axis.vertex(lo)) > best_d or best_t == lo):
        raise AssertionError("projection window certificate failed (lower end)")
    return best_t, best_d


@dataclass
class ProjectionReport:
    unbounded: bool
    diameter: int | None
    gate_min: int | None = None
    gate_max: int | None = None
    window: int | None = None


def projection_diameter(g: Word, h: Word, *, margin: int = 8) -> ProjectionReport:
    """Diameter of the nearest-point projection of h.axis(g) onto axis(g).

    For h in E(g) the translate is the axis itself and the projection is
    unbounded; this is reported as an outcome, not a number.  Otherwise the
    projection parameters of h.v_t stabilize once h.v_t leaves the axis, so
    a finite window with a frozen-tail check computes the exact diameter.
    """
    if elementary_membership(g, h):
        return ProjectionReport(unbounded=True, diameter=None)
    axis = Axis(g)
    window = len(h) + 2 * len(axis.conj) + 2 * axis.period + margin
    for attempt in range(6):
        params = range(-window, window + 1)
        gates = [_project_vertex(h * axis.vertex(t), axis)[0] for t in params]
        tail = axis.period + 2
        head_frozen = len(set(gates[:tail])) == 1
        tail_frozen = len(set(gates[-tail:])) == 1
        if head_frozen and tail_frozen:
            return ProjectionReport(
                unbounded=False,
                diameter=max(gates) - min(gates),
                gate_min=min(gates),
                gate_max=max(gates),
                window=window,
            )
        window *= 2
    raise AssertionError("projection gates failed to stabilize; widening bug")


def projection_diameter_brute(g: Word, h: Word, radius: int) -> int | None:
    """Brute-force oracle: nearest-point projection over axis vertices inside
    B(radius), quadratic in the vertex counts.  None when h is elementary."""
    if elementary_membership(g, h):
        return None
    axis = Axis(g)
    on_axis: list[tuple[int, Word]] = []
    t = 0
    while True:
        v = axis.vertex(t)
        grew = False
        if len(v) <= radius:
            on_axis.append((t, v))
            grew = True
        if t > 0:
            vm = axis.vertex(-t)
            if len(vm) <= radius:
                on_axis.append((-t, vm))
                grew = True
        if not grew and t > radius:
            break
        t += 1
    translated = [h * v for _, v in on_axis if len(h * v) <= radius]
    gates = set()
    for z in translated:
        best = None
        for t, v in on_axis:
            d = _distance(z, v)
            if best is None or d < best[0] or (d == best[0] and abs(t) < abs(best[1])):
                best = (d, t)
        gates.add(best[1])
    return max(gates) - min(gates) if gates else None


def displacement_by_ball_scan(g: Word, radius: int, *, budget: int | None = None, chunk: int = 250_000) -> int:
    """Brute-force oracle for [g]: min over v in B(radius) of d(g v, v).

    Runs on the array kernels; arithmetic is pure integer comparison, so the
    result is exact.
    """
    ctx = g.ctx
    total = ctx.ball_count(radius)
    if budget is not None and total > budget:
        raise BudgetExceededError(
            f"ball scan over {total} vertices exceeds budget {budget}",
            predicted=total,
            budget=budget,
        )
    gcodes = _kernels.word_to_codes(g)
    mat, lengths = _kernels.ball_matrix(ctx.rank, radius)
    best = None
    for lo in range(0, mat.shape[0], chunk):
        hi = min(lo + chunk, mat.shape[0])
        out = _kernels.conjugate_lengths(gcodes, mat[lo:hi], lengths[lo:hi])
        m = int(out.min()) if len(out) else None
        if m is not None and (best is None or m < best):
            best = m
    return best if best is not None else 0


# -- the constant cascade -----------------------------------------------------------


def _poly(coeffs: tuple[Fraction, Fraction, Fraction], x: Fraction) -> Fraction:
    a, b, c = coeffs
    return a * x * x + b * x + c


def _parse_triple(text: str) -> tuple[Fraction, Fraction, Fraction]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ParseError(f"expected three comma-separated coefficients, got {text!r}")
    vals = tuple(Fraction(p) for p in parts)
    return vals  # type: ignore[return-value]


@dataclass(frozen=True)
class ConstantProvider:
    """Configurable constants of the admissible-path machinery (tree case).

    ``q1``, ``q2``, ``q3`` are quadratic coefficient triples (a, b, c) for
    a x^2 + b x + c.  The defaults are conservative documented choices, not
    values pinned by theory; the empirical checks downstream never depend on
    them, only the theory-side thresholds do.
    """

    delta: Fraction = Fraction(0)
    q1: tuple[Fraction, Fraction, Fraction] = (Fraction(1), Fraction(1), Fraction(0))
    q2: tuple[Fraction, Fraction, Fraction] = (Fraction(1), Fraction(1), Fraction(0))
    q3: tuple[Fraction, Fraction, Fraction] = (Fraction(1), Fraction(1), Fraction(0))
    d0: Fraction = Fraction(1)
    cprime: Fraction = Fraction(1)  # max displacement of a generator: 1 on the tree

    def __post_init__(self):
        values = [self.delta, self.d0, self.cprime, *self.q1, *self.q2, *self.q3]
        if any(v < 0 for v in values):
            raise HypothesisViolationError("provider constants must be nonnegative")

    def Q1(self, lam: Fraction) -> Fraction:
        return _poly(self.q1, lam)

    def Q2(self, lam: Fraction) -> Fraction:
        return _poly(self.q2, lam)

    def Q3(self, lam: Fraction) -> Fraction:
        return _poly(self.q3, lam)

    def mu(self, lam: Fraction) -> Fraction:
        return self.Q3(lam)

    def eps(self, lam: Fraction) -> Fraction:
        return self.Q3(lam)

    def sigma(self, lam: Fraction, u: Fraction) -> Fraction:
        return Fraction(3, 2) * self.Q3(lam) + 2 * u

    def nu(self, u: Fraction, lam: Fraction) -> Fraction:
        # bounded intersection measured against geodesics (gauge at scale 1),
        # with the displacement bounded by lam * tau and tau normalized to 1
        return 2 * u + self.Q2(Fraction(1)) * (1 + lam)

    def bounded_projection(self, lam: Fraction) -> Fraction:
        """The gauge-scale projection bound Q2(lam)(1 + [g]), cubic in lam."""
        return self.Q2(lam) * (1 + lam)

    @classmethod
    def default(cls) -> "ConstantProvider":
        return cls()

    @classmethod
    def from_text(cls, text: str) -> "ConstantProvider":
        """Parse the flat key-value provider format (``Q1=1,1,0`` etc.)."""
        kwargs: dict = {}
        keymap = {"delta": "delta", "q1": "q1", "q2": "q2", "q3": "q3", "d0": "d0", "cprime": "cprime"}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"provider line has no '=': {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().lower()
            if key not in keymap:
                raise ParseError(f"unknown provider key {key!r}")
            if key in ("q1", "q2", "q3"):
                kwargs[keymap[key]] = _parse_triple(value)
            else:
                kwargs[keymap[key]] = Fraction(value.strip())
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "delta": str(self.delta),
            "Q1": [str(v) for v in self.q1],
            "Q2": [str(v) for v in self.q2],
            "Q3": [str(v) for v in self.q3],
            "D0": str(self.d0),
            "Cprime": str(self.cprime),
        }


@dataclass
class CascadeReport:
    """The constant chain C -> B -> R -> Lambda -> D with threshold lam * D."""

    lam: Fraction
    g_length: int
    c_lam: Fraction
    b_lam: Fraction
    r_const: Fraction
    big_lambda: Fraction
    d_const: Fraction
    threshold: Fraction
    bounded_projection: Fraction

    def to_dict(self) -> dict:
        return {
            "lambda": str(self.lam),
            "g_length": self.g_length,
            "C": str(self.c_lam),
            "B": str(self.b_lam),
            "R": str(self.r_const),
            "Lambda": str(self.big_lambda),
            "D": str(self.d_const),
            "threshold": str(self.threshold),
            "bounded_projection": str(self.bounded_projection),
        }


def constant_cascade(
    lam: Fraction | int, g_length: int, provider: ConstantProvider | None = None
) -> CascadeReport:
    """Evaluate the full constant chain in exact rational arithmetic.

    With the default quadratic gauges the threshold lam*D grows with degree
    six when lam scales linearly with the word length.
    """
    provider = provider or ConstantProvider.default()
    lam = Fraction(lam)
    if lam < 1:
        raise HypothesisViolationError("a quasi-axis constant satisfies lam >= 1")
    glen = Fraction(g_length)
    one = Fraction(1)
    mu_l, eps_l = provider.mu(lam), provider.eps(lam)
    mu_1, eps_1 = provider.mu(one), provider.eps(one)
    cp = provider.cprime
    c_lam = lam * (mu_l + eps_l + cp * glen)
    b_lam = 2 * eps_1 + 2 * mu_1 + provider.nu(mu_1 + provider.sigma(lam, Fraction(0)), lam) + cp * glen
    r_const = max(
        cp * glen + 2 * eps_1 + 4 * mu_1 + 1,
        mu_1 + 5 * eps_1 + b_lam + 1,
    )
    big_lambda = lam * (6 * r_const + 1)
    d_const = max(
        mu_1 + eps_1 + cp * glen + c_lam,
        2 * cp * glen + 3 * eps_1 + 6 * mu_1,
        big_lambda * (r_const + provider.sigma(lam, mu_1)),
        13 * eps_1 + 6 * mu_1 + 2 * b_lam,
    )
    return CascadeReport(
        lam=lam,
        g_length=g_length,
        c_lam=c_lam,
        b_lam=b_lam,
        r_const=r_const,
        big_lambda=big_lambda,
        d_const=d_const,
        threshold=lam * d_const,
        bounded_projection=provider.bounded_projection(lam),
    )


def quasi_axis_constant(g: Word) -> Fraction:
    """lam = d(g.e, e) / tau(g) = |g| / [g] for the tree action."""
    tl = translation_length(g)
    if tl == 0:
        raise HypothesisViolationError("the identity is not loxodromic")
    return Fraction(len(g), tl)


# -- admissible paths ----------------------------------------------------------------


@dataclass
class PathReport:
    product: Word
    nontrivial: bool
    breakpoints: list[Word]
    lambda_emp: Fraction | None  # None when two breakpoints coincide
    lambda_theory: Fraction
    threshold: Fraction
    threshold_met: bool
    comparison_ok: bool | None  # lambda_emp <= lambda_theory, when applicable


def admissible_path_check(
    g: Word,
    h_list: Sequence[Word],
    n_list: Sequence[int],
    provider: ConstantProvider | None = None,
) -> PathReport:
    """Exact nontriviality and quasi-geodesic quality of
    h_1 g^{n_1} h_2 g^{n_2} ... h_m g^{n_m}.

    Hypotheses checked: h_i not in E(g), |h_i| <= |g|, all n_i nonzero except
    possibly the last.  The empirical constant compares path length along the
    broken line against tree distance over all breakpoint pairs.
    """
    if g.is_identity:
        raise HypothesisViolationError("g must be loxodromic (nonidentity)")
    if len(h_list) != len(n_list):
        raise HypothesisViolationError("need as many h's as exponents")
    if not h_list:
        raise HypothesisViolationError("empty product")
    for i, h in enumerate(h_list):
        if elementary_membership(g, h):
            raise HypothesisViolationError(f"h_{i + 1} lies in E(g)")
        if len(h) > len(g):
            raise HypothesisViolationError(f"|h_{i + 1}| = {len(h)} exceeds |g| = {len(g)}")
    for i, n in enumerate(n_list):
        if n == 0 and i != len(n_list) - 1:
            raise HypothesisViolationError(f"exponent n_{i + 1} is zero (only the last may be)")
    breakpoints = [g.ctx.identity]
    path_len = [Fraction(0)]
    w = g.ctx.identity
    for h, n in zip(h_list, n_list):
        w = w * h
        breakpoints.append(w)
        path_len.append(path_len[-1] + len(h))
        w = w * g ** n
        breakpoints.append(w)
        path_len.append(path_len[-1] + abs(n) * len(g))
    product = w
    lam_emp: Fraction | None = Fraction(1)
    for i in range(len(breakpoints)):
        for j in range(i + 1, len(breakpoints)):
            dist = _distance(breakpoints[i], breakpoints[j])
            travel = path_len[j] - path_len[i]
            if dist == 0:
                if travel:
                    lam_emp = None
                continue
            if lam_emp is not None:
                lam_emp = max(lam_emp, travel / dist)
    lam = quasi_axis_constant(g)
    cascade = constant_cascade(lam, len(g), provider)
    threshold_met = all(abs(n) >= cascade.threshold for n in n_list[:-1]) and (
        n_list[-1] == 0 or abs(n_list[-1]) >= cascade.threshold
    )
    comparison = None
    if threshold_met:
        comparison = lam_emp is not None and lam_emp <= cascade.big_lambda
    return PathReport(
        product=product,
        nontrivial=not product.is_identity,
        breakpoints=breakpoints,
        lambda_emp=lam_emp,
        lambda_theory=cascade.big_lambda,
        threshold=cascade.threshold,
        threshold_met=threshold_met,
        comparison_ok=comparison,
    )


@dataclass
class SearchReport:
    n_emp: int
    threshold: Fraction
    tuples_checked: int
    products_checked: int
    window: int
    witnesses: list[tuple]  # failing (h-tuple, exponents) found below n_emp


def minimal_exponent_search(
    g: Word,
    h_ball_radius: int,
    m: int,
    provider: ConstantProvider | None = None,
    *,
    budget: int | None = None,
    n_cap: int | None = None,
) -> SearchReport:
    """Smallest N such that every product h_1 g^{n_1} ... h_m g^{n_m} with
    |n_i| >= N (the last exponent may also be zero) is nontrivial, over all
    h-tuples drawn from B(h_ball_radius) minus E(g).

    Exponents are enumerated over a finite box that provably contains every
    trivializing tuple: writing g = u c u^-1 and k_i = u^-1 h_i u, a trivial
    product forces each power block to lose all its letters, and each k_j
    can erase at most |k_j| letters plus one core period of alignment, so
    some block dies only while |n_i| stays below
    (2 max|k| + 2|c|)/|c| + 2.  Beyond the box every block keeps a full
    period and the product cannot collapse.
    """
    if g.is_identity:
        raise HypothesisViolationError("g must be loxodromic (nonidentity)")
    if m < 1:
        raise HypothesisViolationError("need at least one factor")
    ctx = g.ctx
    core, conj = g.cyclic_reduce()
    candidates = [
        h
        for h in ctx.enumerate_ball(h_ball_radius, budget=budget)
        if not h.is_identity and not elementary_membership(g, h)
    ]
    if not candidates:
        raise HypothesisViolationError("no admissible h in the ball")
    max_k = max(len(h) for h in candidates) + 2 * len(conj)
    window = (2 * max_k + 2 * len(core)) // len(core) + 3
    lam = quasi_axis_constant(g)
    threshold = constant_cascade(lam, len(g), provider).threshold
    cap = n_cap if n_cap is not None else int(math.ceil(threshold)) + 1
    witnesses: list[tuple] = []
    tuples_checked = 0
    products_checked = 0
    n = 1
    while n <= cap:
        hi = n + window
        exponents = [e for v in range(n, hi + 1) for e in (v, -v)]
        powers = {e: g ** e for e in exponents}
        powers[0] = ctx.identity
        bad = None
        for h_tuple in itertools.product(candidates, repeat=m):
            tuples_checked += 1
            for exps in itertools.product(exponents, repeat=m - 1):
                for last in [0] + exponents:
                    w = ctx.identity
                    for h, e in zip(h_tuple, exps + (last,)):
                        w = w * h * powers[e]
                    products_checked += 1
                    if w.is_identity:
                        bad = (tuple(str(h) for h in h_tuple), exps + (last,))
                        break
                if bad:
                    break
            if bad:
                break
        if bad is None:
            return SearchReport(
                n_emp=n,
                threshold=threshold,
                tuples_checked=tuples_checked,
                products_checked=products_checked,
                window=window,
                witnesses=witnesses,
            )
        witnesses.append(bad)
        n += 1
    raise AssertionError("exponent search exceeded the theoretical threshold; bug")

"""Certified two-sided bounds on the reduced operator norm.

For an element ``x`` supported on the radius-``r`` ball of a free group the
classical layered Haagerup bound gives

    ||lambda(x)|| <= sum_k (k+1) ||x_k||_2,

where ``x_k`` is the length-``k`` layer, and the single-polynomial form
``||lambda(x)|| <= P(r) ||x||_2`` with ``P(r)^2 = sum_{k<=r} (k+1)^2``
follows by Cauchy-Schwarz.  Both are computed here with outward rounding;
the smaller one is the reported upper bound.

Lower bounds come from the power trick: ``||lambda(x)||^{2m}`` equals the
operator norm of ``(x* x)^m``, which dominates its own l2 norm, so

    ||lambda(x)|| >= ||(x* x)^m||_2^{1/2m} = c_m^{1/4m},

with ``c_m = ||(x* x)^m||_2^2`` an exact rational.  Along a doubling
schedule the lower bounds increase monotonically (``c_{2m} >= c_m^2``,
Cauchy-Schwarz for the trace state), which is asserted exactly on the
radicands, never on rounded values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import AlgebraElement, LayeredL2Profile, canonical_hash, convolve
from .errors import BudgetExceededError, HypothesisViolationError
from .rounding import (
    DEFAULT_BITS,
    RootBound,
    compare_roots,
    nth_root_upper,
    to_decimal_string,
)


@dataclass(frozen=True)
class RapidDecayBound:
    """The polynomial certificate P with P(r)^2 = sum_{k<=r} (k+1)^2."""

    radius: int
    weights: tuple[int, ...]  # (k+1) for k = 0..radius
    p_squared: Fraction
    p_value: Fraction  # upper-rounded sqrt(p_squared)

    @classmethod
    def for_radius(cls, radius: int, bits: int = DEFAULT_BITS) -> "RapidDecayBound":
        weights = tuple(k + 1 for k in range(radius + 1))
        p_sq = Fraction(sum(w * w for w in weights))
        return cls(radius, weights, p_sq, nth_root_upper(p_sq, 2, bits))


def p_squared(radius: int) -> Fraction:
    """sum_{k<=radius} (k+1)^2 as an exact rational."""
    n = radius + 1
    return Fraction(n * (n + 1) * (2 * n + 1), 6)


@dataclass(frozen=True)
class HaagerupBound:
    """Layered and flat upper bounds for one element; value is their min."""

    layered_sum: Fraction
    flat: Fraction
    value: Fraction
    radius: int


def haagerup_bound(x: AlgebraElement, bits: int = DEFAULT_BITS) -> HaagerupBound:
    data = x.norms()
    r = x.radius()
    layered = Fraction(0)
    for k, mass in data.layered.layers:
        layered += (k + 1) * nth_root_upper(mass, 2, bits)
    flat = nth_root_upper(p_squared(r) * data.l2_squared, 2, bits)
    return HaagerupBound(layered, flat, min(layered, flat), r)


def haagerup_upper(x: AlgebraElement, bits: int = DEFAULT_BITS) -> Fraction:
    """A true upper bound for ||lambda(x)||, outward-rounded."""
    return haagerup_bound(x, bits).value


@dataclass(frozen=True)
class CertificateRow:
    m: int
    c_m: Fraction  # ||(x* x)^m||_2^2, exact
    layered: LayeredL2Profile  # layered profile of (x* x)^m
    lower: RootBound  # c_m^(1/4m), rounded down
    upper: RootBound  # haagerup((x* x)^m)^(1/2m), rounded up


@dataclass
class NormCertificate:
    """Two-sided certificate for one element, with exact radicands retained."""

    element_hash: str
    schedule: list[int]
    rows: list[CertificateRow]
    best_lower: Fraction
    best_upper: Fraction
    bits: int
    truncated: bool = False
    note: str = ""

    def interval_contains(self, value: Fraction) -> bool:
        return self.best_lower <= value <= self.best_upper

    def to_json_dict(self) -> dict:
        def frac(f: Fraction) -> list[str]:
            return [str(f.numerator), str(f.denominator)]

        def root(b: RootBound) -> dict:
            return {
                "radicand": frac(b.radicand),
                "root_order": b.root_order,
                "direction": b.direction,
                "rounded": frac(b.rounded),
                "approx": to_decimal_string(
                    b.rounded, 12, "down" if b.direction == "lower" else "up"
                ),
            }

        return {
            "element_hash": self.element_hash,
            "schedule": self.schedule,
            "rows": [
                {
                    "m": row.m,
                    "c_m": frac(row.c_m),
                    "layers": [[k, frac(v)] for k, v in row.layered.layers],
                    "lower": root(row.lower),
                    "upper": root(row.upper),
                }
                for row in self.rows
            ],
            "best_lower": frac(self.best_lower),
            "best_upper": frac(self.best_upper),
            "best_lower_approx": to_decimal_string(self.best_lower, 12, "down"),
            "best_upper_approx": to_decimal_string(self.best_upper, 12, "up"),
            "precision_bits": self.bits,
            "truncated": self.truncated,
            "note": self.note,
        }


def power_lower(
    x: AlgebraElement,
    m: int,
    *,
    budget: int | None = None,
    backend: str | None = None,
    bits: int = DEFAULT_BITS,
) -> RootBound:
    """The power-trick lower bound c_m^(1/4m) with its exact radicand."""
    if m < 1 or m & (m - 1):
        raise HypothesisViolationError(f"m must be a power of two, got {m}")
    y = convolve(x.adjoint(), x, budget=budget, backend=backend)
    y_m = y.power(m, budget=budget, backend=backend)
    c_m = y_m.norms().l2_squared
    return RootBound.lower(c_m, 4 * m, bits)


def certify_norm(
    x: AlgebraElement,
    m_max: int,
    *,
    budget: int | None = None,
    backend: str | None = None,
    bits: int = DEFAULT_BITS,
    cache=None,
) -> NormCertificate:
    """Run the doubling schedule m = 1, 2, 4, ..., m_max and certify both sides.

    Budget errors do not propagate: the certificate built so far is returned
    with its ``truncated`` flag set.
    """
    if m_max < 1 or m_max & (m_max - 1):
        raise HypothesisViolationError(f"m_max must be a power of two, got {m_max}")
    schedule = []
    m = 1
    while m <= m_max:
        schedule.append(m)
        m *= 2
    rows: list[CertificateRow] = []
    truncated = False
    note = ""
    try:
        y = convolve(x.adjoint(), x, budget=budget, backend=backend)
        current = y
        for m in schedule:
            if m > 1:
                loaded = cache.load(y, m) if cache is not None else None
                if loaded is not None:
                    current = loaded
                else:
                    current = convolve(current, current, budget=budget, backend=backend)
                    if cache is not None:
                        cache.store(y, m, current)
            data = current.norms()
            c_m = data.l2_squared
            lower = RootBound.lower(c_m, 4 * m, bits)
            h = haagerup_bound(current, bits)
            upper = RootBound.upper(h.value, 2 * m, bits)
            if compare_roots(c_m, 4 * m, h.value ** 2, 4 * m) > 0:
                raise AssertionError("lower bound exceeded upper bound; rounding bug")
            if rows and rows[-1].m * 2 == m:
                if c_m < rows[-1].c_m ** 2:
                    raise AssertionError("power-mean monotonicity failed; arithmetic bug")
            rows.append(CertificateRow(m, c_m, data.layered, lower, upper))
    except BudgetExceededError as exc:
        truncated = True
        note = str(exc)
    if rows:
        best_lower = max(r.lower.rounded for r in rows)
        best_upper = min(r.upper.rounded for r in rows)
    else:
        best_lower = Fraction(0)
        best_upper = haagerup_upper(x, bits)
    return NormCertificate(
        element_hash=canonical_hash(x),
        schedule=[r.m for r in rows] or schedule,
        rows=rows,
        best_lower=best_lower,
        best_upper=best_upper,
        bits=bits,
        truncated=truncated,
        note=note,
    )


def vector_lower(
    x: AlgebraElement,
    probe: AlgebraElement,
    *,
    backend: str | None = None,
    bits: int = DEFAULT_BITS,
) -> RootBound:
    """||x . probe||_2 / ||probe||_2: a true lower bound with exact radicand."""
    if not probe:
        raise HypothesisViolationError("probe must be nonzero")
    image = convolve(x, probe, backend=backend)
    num = image.norms().l2_squared
    den = probe.norms().l2_squared
    return RootBound.lower(num / den, 2, bits)

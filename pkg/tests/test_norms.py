"""Certified norm bounds against closed-form oracles.

Oracles used here and nowhere in the library:
* closed-walk counts on the regular tree (distance-chain recurrence) pin the
  power-trick radicands of the generator sum,
* central binomial coefficients pin the radicands of e + a,
* both elements have known operator norms (2 sqrt(2k-1) and 2), which the
  certified intervals must always contain.
"""

import math
import random
from fractions import Fraction

import pytest

from freenorm import AlgebraElement, certify_norm, haagerup_upper, parse_element, power_lower, vector_lower
from freenorm.errors import HypothesisViolationError
from freenorm.norms import RapidDecayBound, haagerup_bound, p_squared
from freenorm.rounding import (
    compare_roots,
    integer_nth_root,
    nth_root_lower,
    nth_root_upper,
    to_decimal_string,
)

from conftest import random_element, tree_walk_counts


class TestRounding:
    def test_integer_roots(self):
        rng = random.Random(20)
        for _ in range(300):
            n = rng.randrange(0, 10 ** 12)
            k = rng.randrange(1, 7)
            r = integer_nth_root(n, k)
            assert r ** k <= n < (r + 1) ** k

    def test_directed_roots_bracket(self):
        rng = random.Random(21)
        for _ in range(200):
            v = Fraction(rng.randrange(1, 10 ** 6), rng.randrange(1, 10 ** 3))
            k = rng.choice([1, 2, 3, 4, 8])
            lo = nth_root_lower(v, k, 48)
            hi = nth_root_upper(v, k, 48)
            assert lo ** k <= v <= hi ** k
            assert hi - lo <= Fraction(2, 1 << 48) * max(1, hi)

    def test_exact_comparisons(self):
        # A^(1/4) vs B^(1/2) compares A^2 vs B^4 over exact integers
        assert compare_roots(Fraction(2), 4, Fraction(2), 2) < 0
        assert compare_roots(Fraction(4), 4, Fraction(2), 2) == 0
        assert compare_roots(Fraction(6), 4, Fraction(2), 2) > 0

    def test_decimal_rendering_directed(self):
        v = Fraction(1, 3)
        assert to_decimal_string(v, 4, "down") == "0.3333"
        assert to_decimal_string(v, 4, "up") == "0.3334"
        assert to_decimal_string(-v, 2, "down") == "-0.34"


class TestHaagerupUpper:
    def test_single_group_element(self, f2):
        for text, k in [("a", 1), ("a.b", 2), ("b^2.a.b^-2", 5)]:
            g = AlgebraElement.from_word(f2.word(text))
            assert haagerup_upper(g) == k + 1

    def test_one_plus_a(self, f2):
        x = parse_element("1*e + 1*a", f2)
        assert haagerup_upper(x) == 3  # 1*1 + 2*1; true norm is 2

    def test_zero_element(self, f2):
        assert haagerup_upper(AlgebraElement.zero(f2)) == 0

    def test_layered_at_most_flat(self, f2):
        rng = random.Random(22)
        for _ in range(40):
            x = random_element(f2, 3, rng)
            b = haagerup_bound(x)
            assert b.value == min(b.layered_sum, b.flat)
            # Cauchy-Schwarz: the layered sum never exceeds the flat bound by
            # more than rounding slack
            assert b.layered_sum <= b.flat + Fraction(1, 1 << 32)

    def test_rapid_decay_polynomial(self):
        rd = RapidDecayBound.for_radius(3)
        assert rd.p_squared == 1 + 4 + 9 + 16
        assert rd.weights == (1, 2, 3, 4)
        assert p_squared(8) == 285


class TestPowerLower:
    def test_unitary_is_one(self, f2):
        for text in ["a", "a.b^-1", "b^3.a.b^-3"]:
            g = AlgebraElement.from_word(f2.word(text))
            for m in (1, 2, 4):
                bound = power_lower(g, m)
                assert bound.radicand == 1
                assert bound.rounded == 1

    def test_one_plus_a_radicand(self, f2):
        x = parse_element("1*e + 1*a", f2)
        bound = power_lower(x, 1)
        assert bound.radicand == 6
        assert abs(float(bound.rounded) - 6 ** 0.25) < 1e-12

    def test_kesten_monotone_toward_norm(self, f2):
        x = parse_element("1*a + 1*a^-1 + 1*b + 1*b^-1", f2)
        bounds = [power_lower(x, m) for m in (1, 2, 4)]
        values = [b.rounded for b in bounds]
        assert values[0] < values[1] < values[2]
        # all below 2 sqrt(3): radicand c_m <= 12^(2m) exactly
        for m, b in zip((1, 2, 4), bounds):
            assert b.radicand <= Fraction(12) ** (2 * m)

    def test_rejects_bad_m(self, f2):
        with pytest.raises(HypothesisViolationError):
            power_lower(parse_element("1*a", f2), 3)


class TestCertifyNorm:
    def test_identity_element(self, f2):
        cert = certify_norm(parse_element("1*e", f2), 4)
        assert cert.best_lower == 1
        assert cert.best_upper == 1

    def test_zero_element(self, f2):
        cert = certify_norm(AlgebraElement.zero(f2), 2)
        assert cert.best_lower == 0
        assert cert.best_upper == 0

    def test_kesten_interval(self, f2):
        x = parse_element("1*a + 1*a^-1 + 1*b + 1*b^-1", f2)
        cert = certify_norm(x, 4)
        # 2 sqrt(3) inside the reported interval, checked exactly on squares
        assert cert.best_lower ** 2 <= 12 <= cert.best_upper ** 2
        # radicands are the closed-walk counts W_{4m}
        for row in cert.rows:
            assert row.c_m == tree_walk_counts(2, 4 * row.m)

    def test_haar_unitary_interval(self, f2):
        x = parse_element("1*e + 1*a", f2)
        cert = certify_norm(x, 8)
        for row in cert.rows:
            assert row.lower.rounded <= 2 <= row.upper.rounded
            assert row.c_m == math.comb(4 * row.m, 2 * row.m)
        assert cert.rows[0].c_m == 6

    def test_monotone_lower_rows(self, f2):
        x = parse_element("1*a + 1*a^-1 + 1*b + 1*b^-1", f2)
        cert = certify_norm(x, 4)
        for prev, cur in zip(cert.rows, cert.rows[1:]):
            assert cur.c_m >= prev.c_m ** 2  # exact radicand monotonicity
            assert cur.lower.rounded >= prev.lower.rounded

    def test_upper_lower_ratio_shrinks(self, f2):
        x = parse_element("1*a + 1*a^-1 + 1*b + 1*b^-1", f2)
        cert = certify_norm(x, 4)
        ratios = [row.upper.rounded / row.lower.rounded for row in cert.rows]
        assert ratios[0] > ratios[1] > ratios[2]
        # ratio at step m is at most P(2m * radius)^(1/2m)
        r = x.radius()
        for row, ratio in zip(cert.rows, ratios):
            cap = nth_root_upper(p_squared(2 * row.m * r), 4 * row.m)
            assert ratio <= cap + Fraction(1, 1 << 20)

    def test_truncation_flag(self, f2):
        x = parse_element("1*a + 1*a^-1 + 1*b + 1*b^-1", f2)
        cert = certify_norm(x, 8, budget=200)
        assert cert.truncated
        assert cert.rows  # partial schedule retained
        assert cert.best_lower <= cert.best_upper

    def test_random_soundness_sandwich(self, f2):
        rng = random.Random(23)
        for _ in range(10):
            x = random_element(f2, 1, rng)
            cert = certify_norm(x, 2)
            assert cert.best_lower <= cert.best_upper
            for row in cert.rows:
                assert compare_roots(row.lower.radicand, 4 * row.m, row.upper.radicand, 2 * row.m) <= 0


class TestVectorLower:
    def test_delta_probe(self, f2):
        x = parse_element("2*e + 1*a + 1*a^-1", f2)
        e = parse_element("1*e", f2)
        assert vector_lower(x, e).radicand == x.norms().l2_squared

    def test_unitary_probe(self, f2):
        g = AlgebraElement.from_word(f2.word("a.b"))
        probe = parse_element("1*e + 2*b^-1", f2)
        assert vector_lower(g, probe).radicand == 1

    def test_improving_probe(self, f2):
        x = parse_element("1*e + 1*a", f2)
        probe = parse_element("1*e + 1*a^-1", f2)
        improved = vector_lower(x, probe)
        assert improved.radicand == 3  # ||x probe||^2/||probe||^2 = 6/2
        assert improved.radicand > x.norms().l2_squared

    def test_zero_probe_rejected(self, f2):
        with pytest.raises(HypothesisViolationError):
            vector_lower(parse_element("1*a", f2), AlgebraElement.zero(f2))

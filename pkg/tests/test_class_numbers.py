import math
from math import gcd, isqrt

import pytest

from ternary_mass import arith, class_numbers
from ternary_mass.class_numbers import BinaryForm, reduce_form, reduced_forms


def brute_reduced_forms(D):
    """Exhaustive scan oracle: |b| <= a <= sqrt(|D|/3), boundary rules applied."""
    out = []
    for a in range(1, isqrt(-D // 3) + 1):
        for b in range(-a, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (abs(b) == a or a == c):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(BinaryForm(a, b, c))
    return sorted(out)


class TestReducedForms:
    def test_examples(self):
        assert [(f.a, f.b, f.c) for f in reduced_forms(-4)] == [(1, 0, 1)]
        assert [(f.a, f.b, f.c) for f in reduced_forms(-23)] == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]
        assert [(f.a, f.b, f.c) for f in reduced_forms(-120)] == [
            (1, 0, 30),
            (2, 0, 15),
            (3, 0, 10),
            (5, 0, 6),
        ]

    def test_against_scan_oracle(self):
        for D in range(-3, -700, -1):
            if D % 4 in (2, 3):
                continue
            assert reduced_forms(D) == brute_reduced_forms(D)

    def test_form_invariants(self):
        for D in range(-3, -400, -1):
            if D % 4 in (2, 3):
                continue
            for f in reduced_forms(D):
                assert f.discriminant == D
                assert f.is_primitive()
                assert f.is_reduced()
                assert f.is_positive_definite()

    def test_invalid_discriminant(self):
        with pytest.raises(ValueError):
            reduced_forms(-6)
        with pytest.raises(ValueError):
            reduced_forms(5)

    def test_sl2_reduction_oracle(self):
        # independent class count: reduce every primitive form with a,|b|,c <= |D|
        for D in range(-3, -201, -1):
            if D % 4 in (2, 3):
                continue
            seen = set()
            bound = -D
            for a in range(1, bound + 1):
                for b in range(-bound, bound + 1):
                    num = b * b - D
                    if num % (4 * a):
                        continue
                    c = num // (4 * a)
                    if c > bound or gcd(gcd(a, b), c) != 1:
                        continue
                    seen.add(reduce_form(BinaryForm(a, b, c)))
            assert sorted(seen) == reduced_forms(D), D


class TestReduceForm:
    def test_fixed_point_on_reduced(self):
        for D in (-23, -120, -163, -479):
            for f in reduced_forms(D):
                assert reduce_form(f) == f

    def test_preserves_discriminant_and_values(self):
        # equivalent forms represent the same integers
        f = BinaryForm(7, 5, 13)
        r = reduce_form(f)
        assert r.is_reduced()
        assert r.discriminant == f.discriminant
        reachable = lambda g: sorted(
            g(x, y) for x in range(-8, 9) for y in range(-8, 9) if (x, y) != (0, 0)
        )[:20]
        assert reachable(f) == reachable(r)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            reduce_form(BinaryForm(1, 10, 1))


class TestClassNumber:
    def test_examples(self):
        assert class_numbers.class_number(-3) == 1
        assert class_numbers.class_number(-40) == 2
        assert class_numbers.class_number(-280) == 4
        assert class_numbers.class_number(-23) == 3

    def test_unit_count(self):
        assert class_numbers.unit_count(-3) == 6
        assert class_numbers.unit_count(-4) == 4
        assert class_numbers.unit_count(-163) == 2
        assert class_numbers.unit_count(-8) == 2


class TestDirichletL1:
    def test_examples(self):
        assert class_numbers.dirichlet_L1(-4) == pytest.approx(math.pi / 4, abs=1e-12)
        assert class_numbers.dirichlet_L1(-3) == pytest.approx(
            math.pi / (3 * math.sqrt(3)), abs=1e-12
        )
        assert class_numbers.dirichlet_L1(-120) == pytest.approx(
            4 * math.pi / math.sqrt(120), abs=1e-12
        )

    def test_methods_agree_to_2000(self):
        for D in range(-3, -2001, -1):
            if D % 4 in (2, 3) or not arith.is_fundamental_discriminant(D):
                continue
            a = class_numbers.dirichlet_L1(D, "class-number")
            b = class_numbers.dirichlet_L1(D, "character-sum")
            assert abs(a - b) < 1e-8, D

    def test_non_fundamental_rejected(self):
        with pytest.raises(ValueError, match="imprimitive"):
            class_numbers.dirichlet_L1(-12)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            class_numbers.dirichlet_L1(-4, "magic")

    def test_imprimitive_route(self):
        # Kronecker L at non-fundamental D equals the class-number form there too
        for D in (-12, -16, -27, -36, -48, -75, -100):
            h = class_numbers.class_number(D)
            w = class_numbers.unit_count(D)
            lhs = 2 * math.pi * h / (w * math.sqrt(-D))
            assert class_numbers.dirichlet_L1_any(D) == pytest.approx(lhs, rel=1e-10)

from math import gcd, isqrt

import numpy as np
import pytest

from ternary_mass import arith, class_numbers
from ternary_mass.errors import RangeError
from ternary_mass.ternary_forms import (
    RAMANUJAN_Q,
    RAMANUJAN_QPRIME,
    SPINOR_A,
    SPINOR_B,
    THREE_SQUARES,
    RealQuadraticRing,
    TernaryForm,
    _lattice_index_2d,
    automorph_count,
    rep_count,
    rep_count_real_quadratic,
    rep_counts_upto,
    solutions,
)

ALL_FORMS = [THREE_SQUARES, RAMANUJAN_Q, RAMANUJAN_QPRIME, SPINOR_A, SPINOR_B]


def brute_rep(Q, n):
    """Plain nested-loop oracle, bounds from the smallest diagonal entry."""
    bound = isqrt(4 * n) + 2
    allc = prim = 0
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            for z in range(-bound, bound + 1):
                if Q(x, y, z) == n:
                    allc += 1
                    if gcd(gcd(x, y), z) == 1:
                        prim += 1
    return allc, prim


class TestTernaryForm:
    def test_dets(self):
        assert THREE_SQUARES.det == 1
        assert RAMANUJAN_Q.det == 10
        assert RAMANUJAN_QPRIME.det == 10
        # the classical even-matrix determinant is 8 det(G)
        assert int(round(np.linalg.det(2 * RAMANUJAN_Q.matrix()))) == 80

    def test_validation(self):
        with pytest.raises(ValueError):
            TernaryForm(((1, 1, 0), (0, 1, 0), (0, 0, 1)))  # asymmetric
        with pytest.raises(ValueError):
            TernaryForm(((0, 0, 0), (0, 1, 0), (0, 0, 1)))  # not definite
        with pytest.raises(ValueError):
            TernaryForm(((-1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def test_evaluation(self):
        assert RAMANUJAN_QPRIME(1, 0, 1) == 3
        assert RAMANUJAN_QPRIME(1, 0, -1) == 7


class TestRepCount:
    def test_spec_examples(self):
        assert rep_count(THREE_SQUARES, 5).count_primitive == 24
        assert rep_count(RAMANUJAN_Q, 3).count_primitive == 0
        r = rep_count(RAMANUJAN_QPRIME, 3)
        assert r.count_primitive == 4
        sols = {tuple(v) for v in solutions(RAMANUJAN_QPRIME, 3)}
        assert sols == {(0, 0, 1), (0, 0, -1), (1, 0, 1), (-1, 0, -1)}

    def test_gauss_cross_check_n5(self):
        # 24 = (24/w) h(-20) with h(-20)=2, w=2
        assert class_numbers.class_number(-20) == 2
        assert rep_count(THREE_SQUARES, 5).count_primitive == (24 // 2) * 2

    @pytest.mark.parametrize("form", ALL_FORMS)
    def test_brute_force_oracle(self, form):
        call, prim = rep_counts_upto(form, 40)
        for n in range(1, 41):
            oa, op = brute_rep(form, n)
            assert (int(call[n]), int(prim[n])) == (oa, op), (form.gram, n)

    def test_single_matches_bulk(self):
        call, prim = rep_counts_upto(RAMANUJAN_Q, 200)
        for n in (1, 2, 11, 89, 200):
            r = rep_count(RAMANUJAN_Q, n)
            assert (r.count_all, r.count_primitive) == (int(call[n]), int(prim[n]))

    def test_squarefree_all_primitive(self):
        call, prim = rep_counts_upto(THREE_SQUARES, 300)
        sf = arith.squarefree_mask_upto(300)
        for n in range(1, 301):
            if sf[n]:
                assert call[n] == prim[n]

    def test_gauss_closed_form_squarefree(self):
        # (24/w) h(-4n) resp. (48/w) h(-n) for squarefree admissible n
        _, prim = rep_counts_upto(THREE_SQUARES, 500)
        sf = arith.squarefree_mask_upto(500)
        for n in range(1, 501):
            if not sf[n]:
                continue
            if n % 8 in (0, 4, 7):
                assert prim[n] == 0
                continue
            D = -n if n % 8 == 3 else -4 * n
            h = class_numbers.class_number(D)
            w = class_numbers.unit_count(D)
            expected = (48 // w) * h if n % 8 == 3 else (24 // w) * h
            assert int(prim[n]) == expected, n

    def test_domain_and_range_errors(self):
        with pytest.raises(ValueError):
            rep_count(THREE_SQUARES, 0)
        with pytest.raises(RangeError):
            rep_counts_upto(THREE_SQUARES, 10**10)

    def test_solution_values(self):
        for n in (9, 25, 30):
            for v in solutions(RAMANUJAN_QPRIME, n):
                assert RAMANUJAN_QPRIME(int(v[0]), int(v[1]), int(v[2])) == n


class TestAutomorphs:
    def test_paper_values(self):
        assert automorph_count(THREE_SQUARES) == 24
        assert automorph_count(RAMANUJAN_Q) == 8
        assert automorph_count(RAMANUJAN_QPRIME) == 4

    def test_unimodular_invariance(self):
        rng = np.random.default_rng(2024)
        found = 0
        while found < 20:
            U = rng.integers(-2, 3, size=(3, 3))
            if round(np.linalg.det(U)) != 1:
                continue
            found += 1
            for form in (THREE_SQUARES, RAMANUJAN_QPRIME):
                G = form.matrix()
                H = U.T @ G @ U
                assert automorph_count(TernaryForm.from_matrix(H)) == automorph_count(form)


class TestRealQuadratic:
    def test_ring_validation(self):
        RealQuadraticRing(35)
        RealQuadraticRing(2)
        RealQuadraticRing(34)
        with pytest.raises(ValueError):
            RealQuadraticRing(37)  # 1 mod 4
        with pytest.raises(ValueError):
            RealQuadraticRing(12)  # not squarefree
        with pytest.raises(ValueError):
            RealQuadraticRing(-2)

    def test_total_positivity(self):
        R = RealQuadraticRing(35)
        assert R.is_totally_positive((7, 1))  # 7 > sqrt(35)
        assert not R.is_totally_positive((5, 1))  # 5 - sqrt(35) < 0
        assert not R.is_totally_positive((0, 0))
        assert R.is_totally_positive((6, -1))

    def test_sqrt35_controls(self):
        R = RealQuadraticRing(35)
        assert rep_count_real_quadratic(R, 2).count_all == 12
        with pytest.raises(ValueError):
            rep_count_real_quadratic(R, 0)
        with pytest.raises(ValueError):
            rep_count_real_quadratic(R, (5, 1))

    def test_sqrt35_blocked_value(self):
        R = RealQuadraticRing(35)
        res = rep_count_real_quadratic(R, 7 * 29 * 29)
        assert res.count_all == 0
        assert res.count_primitive == 0

    def test_brute_force_oracle_to_30(self):
        R = RealQuadraticRing(35)
        cands = []
        for a in range(-7, 8):
            for b in range(-2, 3):
                s0, s1 = a * a + 35 * b * b, 2 * a * b
                if s0 <= 30 and R.is_totally_nonnegative((30 - s0, -s1)):
                    cands.append((a, b))
        for n in range(1, 31):
            expected = 0
            for xa, xb in cands:
                for ya, yb in cands:
                    for za, zb in cands:
                        s0 = xa * xa + ya * ya + za * za + 35 * (xb * xb + yb * yb + zb * zb)
                        s1 = 2 * (xa * xb + ya * yb + za * zb)
                        if (s0, s1) == (n, 0):
                            expected += 1
            assert rep_count_real_quadratic(R, n).count_all == expected, n

    def test_rational_element_counts_match_nonzero_b(self):
        # m=2 admits genuinely irrational coordinates: 2 = 0^2 + 0^2 + (sqrt2)^2 etc.
        R = RealQuadraticRing(2)
        res = rep_count_real_quadratic(R, 2)
        # (±1,±1,0) patterns give 12; (0,0,±sqrt2) patterns give 6 more
        assert res.count_all == 18

    def test_primitivity_filter(self):
        R = RealQuadraticRing(35)
        res = rep_count_real_quadratic(R, 4)
        # (±2,0,0) patterns are imprimitive, (±1,±1,... ) none sum to 4 except 1+1+2? no
        assert res.count_all == 6
        assert res.count_primitive == 0

    def test_lattice_index(self):
        assert _lattice_index_2d([(1, 0), (0, 1)]) == 1
        assert _lattice_index_2d([(2, 0), (0, 2), (1, 1), (35, 1)]) == 2
        assert _lattice_index_2d([(2, 0), (0, 2)]) == 4

    def test_unit_ideal_decisions(self):
        R = RealQuadraticRing(35)
        assert R.element_is_unit_ideal([(1, 0)])
        assert R.element_is_unit_ideal([(2, 0), (1, 1)]) is False  # norm-2 prime ideal
        assert R.element_is_unit_ideal([(2, 0), (3, 0)])  # gcd(2,3)=1
        assert R.element_is_unit_ideal([(0, 1), (2, 0)])  # (sqrt35, 2) contains gcd(35,2)=1
        assert R.element_is_unit_ideal([(0, 1), (5, 0)]) is False  # ramified prime over 5

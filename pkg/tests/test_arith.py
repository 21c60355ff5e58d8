import random

import numpy as np
import pytest
import sympy

from ternary_mass import arith
from ternary_mass.errors import RangeError


def trial_division_oracle(n):
    """Independent factorization by unbounded trial division."""
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


class TestFactorize:
    def test_unit(self):
        assert arith.factorize(1).factors == ()

    def test_120(self):
        assert arith.factorize(120).factors == trial_division_oracle(120) == ((2, 3), (3, 1), (5, 1))

    def test_5887(self):
        # 7 * 29^2
        assert arith.factorize(5887).factors == trial_division_oracle(5887) == ((7, 1), (29, 2))

    def test_roundtrip_small(self):
        for n in range(1, 100_001):
            assert arith.factorize(n).recompose() == n

    def test_roundtrip_random_60bit(self):
        rng = random.Random(12345)
        for _ in range(1000):
            n = rng.getrandbits(60) | 1
            fac = arith.factorize(n)
            assert fac.recompose() == n
            for p, e in fac.factors:
                assert e >= 1
                assert sympy.isprime(p)
            assert list(fac.primes()) == sorted(fac.primes())

    def test_range_errors(self):
        with pytest.raises(RangeError):
            arith.factorize(0)
        with pytest.raises(RangeError):
            arith.factorize(2**63)

    def test_is_prime_against_sympy(self):
        for n in range(0, 3000):
            assert arith.is_prime(n) == sympy.isprime(n)
        rng = random.Random(7)
        for _ in range(200):
            n = rng.getrandbits(50)
            assert arith.is_prime(n) == sympy.isprime(n)


class TestKronecker:
    def test_euler_criterion_example(self):
        # (-4/3) via the Euler criterion: (-4) = 2 mod 3 and 2^((3-1)/2) = 2 = -1 mod 3
        assert pow(-4 % 3, (3 - 1) // 2, 3) == 3 - 1
        assert arith.kronecker(-4, 3) == -1

    def test_unit_argument(self):
        for D in (-3, -4, -7, -8, -20, -163, -1000):
            assert arith.kronecker(D, 1) == 1

    def test_shared_factor(self):
        assert arith.kronecker(-20, 5) == 0

    def test_at_zero(self):
        for D in (-3, -4, -100):
            assert arith.kronecker(D, 0) == 0

    def test_legendre_agreement(self):
        # for odd prime p not dividing D agree with the Legendre symbol
        for D in (-3, -4, -7, -20, -24, -163):
            for p in (3, 5, 7, 11, 13, 101, 997):
                if D % p == 0:
                    continue
                legendre = pow(D % p, (p - 1) // 2, p)
                legendre = -1 if legendre == p - 1 else legendre
                assert arith.kronecker(D, p) == legendre

    def test_sympy_jacobi_agreement(self):
        rng = random.Random(99)
        for _ in range(500):
            D = -rng.randrange(3, 10**6)
            n = rng.randrange(1, 10**6, 2)  # odd positive
            assert arith.kronecker(D, n) == sympy.jacobi_symbol(D, n)

    @pytest.mark.parametrize("D", [-3, -4, -8, -20, -24, -36, -120, -163])
    def test_complete_multiplicativity_exhaustive(self, D):
        # all |n|, |m| <= 1000, signs included
        vals = arith.character_values(D, 10**6 + 1).astype(np.int64)
        # spot check the sign rule the vectorized form relies on
        for a in (1, 7, 40, 999):
            assert arith.kronecker(D, -a) == -arith.kronecker(D, a)

        def k_signed(x):
            return np.where(x >= 0, 1, -1) * vals[np.abs(x)]

        t = np.arange(-1000, 1001)
        kt = k_signed(t)
        prods = k_signed(t[:, None] * t[None, :])
        assert np.array_equal(prods, kt[:, None] * kt[None, :])

    def test_periodicity_fundamental(self):
        for D in range(-3, -501, -1):
            if D % 4 in (2, 3) or not arith.is_fundamental_discriminant(D):
                continue
            q = -D
            vals = arith.character_values(D, 2 * q)
            assert np.array_equal(vals[:q], vals[q : 2 * q])

    def test_character_values_match_scalar(self):
        for D in (-3, -4, -8, -15, -20, -36, -48, -120, -163, -231):
            vals = arith.character_values(D, 300)
            for a in range(300):
                assert vals[a] == arith.kronecker(D, a), (D, a)


class TestClassifyDiscriminant:
    def test_examples(self):
        assert arith.classify_discriminant(-4).kind == arith.FUNDAMENTAL
        info = arith.classify_discriminant(-12)
        assert info.kind == arith.NON_FUNDAMENTAL
        assert (info.conductor, info.fundamental) == (2, -3)
        assert arith.classify_discriminant(-7).kind == arith.FUNDAMENTAL

    def test_not_a_discriminant(self):
        assert arith.classify_discriminant(-5).kind == arith.NOT_A_DISCRIMINANT
        assert arith.classify_discriminant(-6).kind == arith.NOT_A_DISCRIMINANT

    def test_domain_error(self):
        with pytest.raises(ValueError):
            arith.classify_discriminant(4)
        with pytest.raises(ValueError):
            arith.classify_discriminant(0)

    def test_decomposition_consistent(self):
        for D in range(-4, -2000, -1):
            info = arith.classify_discriminant(D)
            if info.kind == arith.NOT_A_DISCRIMINANT:
                assert D % 4 in (2, 3)
                continue
            assert info.fundamental * info.conductor**2 == D
            assert arith.classify_discriminant(info.fundamental).kind == arith.FUNDAMENTAL
            if info.kind == arith.NON_FUNDAMENTAL:
                assert info.conductor >= 2


def test_squarefree_mask_matches_factorization():
    mask = arith.squarefree_mask_upto(2000)
    for n in range(1, 2001):
        assert mask[n] == arith.is_squarefree(n)


def test_primes_upto():
    ps = arith.primes_upto(100)
    assert list(ps[:10]) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(ps) == 25

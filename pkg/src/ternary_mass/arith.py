"""Exact integer arithmetic substrate: factorization, Kronecker symbol,
discriminant classification, and fast real-character value tables.

All functions are pure and operate on Python ints within a 64-bit envelope
(inputs above 2^63 - 1 raise RangeError rather than silently degrading).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .errors import RangeError

MAX_N = 2**63 - 1

# Deterministic Miller-Rabin witness set for n < 3.3 * 10^24, far beyond 2^63.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_BOUND = 10**6


@dataclass(frozen=True)
class Factorization:
    """Canonical prime factorization: primes strictly increasing, exponents >= 1."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def recompose(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 0 <= n <= 2^63 - 1."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d
    raise RangeError(f"pollard rho failed on {n}")  # pragma: no cover


def factorize(n: int) -> Factorization:
    """Canonical factorization of 1 <= n <= 2^63 - 1.

    Trial division up to 10^6, then deterministic Miller-Rabin plus
    Pollard rho for the (at most 64-bit) cofactor.
    """
    if not isinstance(n, (int, np.integer)):
        raise TypeError(f"expected integer, got {type(n).__name__}")
    n = int(n)
    if n < 1 or n > MAX_N:
        raise RangeError(f"factorize: n={n} outside [1, 2^63-1]")
    factors: dict[int, int] = {}
    m = n
    for p in (2, 3, 5):
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    # 6k+-1 wheel up to the trial bound
    p = 7
    step = 4
    while p <= _TRIAL_BOUND and p * p <= m:
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
        p += step
        step = 6 - step
    if m > 1:
        stack = [m]
        while stack:
            v = stack.pop()
            if v == 1:
                continue
            if is_prime(v):
                factors[v] = factors.get(v, 0) + 1
                continue
            if v < _TRIAL_BOUND * _TRIAL_BOUND:
                # composite below trial bound squared must have been split already
                raise RangeError(f"unexpected composite {v}")  # pragma: no cover
            d = _pollard_rho(v)
            stack.append(d)
            stack.append(v // d)
    items = tuple(sorted(factors.items()))
    return Factorization(n=n, factors=items)


def p_adic_valuation(n: int, p: int) -> int:
    """ord_p(n) for n != 0."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return factorize(abs(n)).is_squarefree()


def kronecker(d: int, n: int) -> int:
    """Full Kronecker symbol (d/n) for arbitrary integers.

    Completely multiplicative in n; agrees with the Legendre symbol for odd
    prime n not dividing d; (d/0) = 1 iff |d| = 1 (so 0 for every d < -1).
    """
    a, b = int(d), int(n)
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    v = 0
    while b % 2 == 0:
        b //= 2
        v += 1
    if v % 2 == 0:
        k = 1
    else:
        k = 1 if a % 8 in (1, 7) else -1
    if b < 0:
        b = -b
        if a < 0:
            k = -k
    a %= b
    while a != 0:
        v = 0
        while a % 2 == 0:
            a //= 2
            v += 1
        if v % 2 == 1 and b % 8 in (3, 5):
            k = -k
        if a % 4 == 3 and b % 4 == 3:
            k = -k
        a, b = b % a, a
    return k if b == 1 else 0


NOT_A_DISCRIMINANT = "not-a-discriminant"
FUNDAMENTAL = "fundamental"
NON_FUNDAMENTAL = "non-fundamental"


@dataclass(frozen=True)
class DiscriminantInfo:
    """Classification of a negative integer as a quadratic discriminant.

    For kind == "non-fundamental", D = conductor^2 * fundamental with
    `fundamental` itself a fundamental discriminant and conductor >= 2.
    """

    D: int
    kind: str
    fundamental: int | None = None
    conductor: int | None = None


def classify_discriminant(D: int) -> DiscriminantInfo:
    """Classify D < 0 as fundamental / non-fundamental (with conductor) / neither."""
    D = int(D)
    if D >= 0:
        raise ValueError(f"classify_discriminant requires D < 0, got {D}")
    if D % 4 in (2, 3):
        return DiscriminantInfo(D=D, kind=NOT_A_DISCRIMINANT)
    fac = factorize(-D)
    s = 1
    for p, e in fac.factors:
        s *= p ** (e // 2)
    core = D // (s * s)  # squarefree, negative
    if core % 4 == 1:
        d0, f = core, s
    else:
        # core = 2,3 mod 4 forces s even, else D = 2,3 mod 4
        assert s % 2 == 0
        d0, f = 4 * core, s // 2
    if f == 1:
        return DiscriminantInfo(D=D, kind=FUNDAMENTAL, fundamental=D, conductor=1)
    return DiscriminantInfo(D=D, kind=NON_FUNDAMENTAL, fundamental=d0, conductor=f)


def is_fundamental_discriminant(D: int) -> bool:
    return D < 0 and classify_discriminant(D).kind == FUNDAMENTAL


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (simple sieve)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def squarefree_mask_upto(n: int) -> np.ndarray:
    """Boolean array m of length n+1 with m[k] = True iff k is squarefree (m[0]=False)."""
    mask = np.ones(n + 1, dtype=bool)
    mask[0] = False
    for p in range(2, isqrt(n) + 1):
        mask[p * p :: p * p] = False
    return mask


@lru_cache(maxsize=None)
def _legendre_table(p: int) -> np.ndarray:
    """Legendre symbols (a/p) for a in [0, p) as an int8 array, p an odd prime."""
    t = np.full(p, -1, dtype=np.int8)
    t[0] = 0
    a = np.arange(1, (p + 1) // 2, dtype=np.int64)
    t[(a * a) % p] = 1
    return t

_CHI_MINUS4 = np.array([0, 1, 0, -1], dtype=np.int8)
_CHI_8 = np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int8)
_CHI_MINUS8 = np.array([0, 1, 0, 1, 0, -1, 0, -1], dtype=np.int8)


def character_values(D: int, length: int) -> np.ndarray:
    """Values of the Kronecker symbol (D/a) for a = 0 .. length-1 (int8 array).

    D must be a negative discriminant (D = 0,1 mod 4).  Fundamental D gives
    the primitive real character mod |D|; non-fundamental D gives the
    imprimitive symbol, i.e. the fundamental character zeroed out on the
    conductor's primes.

    Built from per-prime Legendre tables, so cost is O(length * omega(D)).
    """
    info = classify_discriminant(D)
    if info.kind == NOT_A_DISCRIMINANT:
        raise ValueError(f"{D} is not a discriminant")
    if length > 2**31:
        raise RangeError(f"character table of length {length} exceeds envelope")
    d0 = info.fundamental
    a = np.arange(length, dtype=np.int64)
    vals = np.ones(length, dtype=np.int8)
    rem = d0
    for p, _ in factorize(-d0).factors:
        if p == 2:
            continue
        vals *= _legendre_table(p)[a % p]
        rem //= p if p % 4 == 1 else -p
    if rem == -4:
        vals *= _CHI_MINUS4[a & 3]
    elif rem == 8:
        vals *= _CHI_8[a & 7]
    elif rem == -8:
        vals *= _CHI_MINUS8[a & 7]
    else:
        assert rem == 1, rem
    f = info.conductor
    if f > 1:
        for p, _ in factorize(f).factors:
            vals[::p] = 0
    return vals

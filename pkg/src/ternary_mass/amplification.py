"""Character-sum skeleton of the amplified second moment, realized over the
rationals as exact finite identities.

Everything here is an identity about multiplicative characters mod a prime q:
orthogonality (exact, in a root-of-unity representation), Plancherel, the
positivity step S >= (#amplifier primes)^2 |L_target|^2, and the two-orders-
of-summation expansion of the amplified moment into congruence (shifted
convolution) sums.  Coefficients come from the level-20 newform so the sums
carry a realistic Hecke-bounded sequence.

The schoolbook model for the amplification trick is the harmonic complement:
bound |sin x + cos x| by inventing |sin x - cos x| and using an identity.

>>> from math import sin, cos
>>> max(abs((sin(x)+cos(x))**2 + (sin(x)-cos(x))**2 - 2)
...     for x in (0.0, 0.7, 1.9, 2.4, 3.9)) < 1e-12
True
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from . import arith
from .errors import IntegrityError, RangeError
from .lfunctions import NewformSeries


# ---------------------------------------------------------------------------
# Exact cyclotomic arithmetic
# ---------------------------------------------------------------------------


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division in Z[x] for monic den; coefficients low-to-high."""
    num = list(num)
    dd = len(den) - 1
    assert den[-1] == 1
    quot = [0] * max(1, len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        quot[i - dd] = c
        for k in range(dd + 1):
            num[i - dd + k] -= c * den[k]
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n == 1:
        return (-1, 1)
    poly = [0] * (n + 1)
    poly[0] = -1
    poly[n] = 1
    for d in range(1, n):
        if n % d == 0:
            q, r = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert all(c == 0 for c in r)
            poly = q
    return tuple(poly)


def _root_of_unity_sum_is_zero(multiplicities: list[int], order: int) -> bool:
    """Exact test of sum_e m_e * omega^e = 0 for omega a primitive root of
    unity of the given order: divisibility by the cyclotomic polynomial."""
    _, rem = _poly_divmod(list(multiplicities), list(cyclotomic_polynomial(order)))
    return all(c == 0 for c in rem)


# ---------------------------------------------------------------------------
# Character tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """All multiplicative characters mod a prime q, stored as exponent tables
    over a fixed generator (exact), with a float view for analytic sums."""

    q: int
    generator: int
    dlog: np.ndarray  # dlog[a] = k with g^k = a; dlog[0] = -1

    @property
    def n_characters(self) -> int:
        return self.q - 1

    def exponents(self, j: int) -> np.ndarray:
        """Exponent e(a) with xi_j(a) = omega^{e(a)}, omega = e(2 pi i/(q-1))."""
        e = (j * self.dlog) % (self.q - 1)
        e[0] = -1
        return e

    def values(self, j: int) -> np.ndarray:
        """xi_j as a complex vector indexed by residue (0 at index 0)."""
        roots = _unity_roots(self.q - 1)
        out = roots[(j * self.dlog) % (self.q - 1)]
        out[0] = 0.0
        return out

    def orthogonality_exact(self, j1: int, j2: int) -> int:
        """Exact value of sum_a xi_{j1}(a) * conj(xi_{j2}(a)) in {0, q-1}.

        Decided purely in integer arithmetic (cyclotomic divisibility), never
        by floating point.
        """
        order = self.q - 1
        d = (j1 - j2) % order
        if d == 0:
            return order
        mult = [0] * order
        for k in range(order):
            mult[(d * k) % order] += 1
        if not _root_of_unity_sum_is_zero(mult, order):
            raise IntegrityError(
                f"character orthogonality failed exactly at q={self.q}, d={d}"
            )
        return 0


@lru_cache(maxsize=None)
def _unity_roots(order: int) -> np.ndarray:
    k = np.arange(order)
    return np.exp(2j * np.pi * k / order)


@lru_cache(maxsize=None)
def character_table(q: int) -> CharacterTable:
    """Character table mod a prime q (composite moduli are rejected)."""
    if not arith.is_prime(q):
        raise ValueError(f"q={q} must be prime")
    fac = arith.factorize(q - 1)
    g = None
    for cand in range(2, q):
        if all(pow(cand, (q - 1) // p, q) != 1 for p, _ in fac.factors):
            g = cand
            break
    assert g is not None
    dlog = np.full(q, -1, dtype=np.int64)
    acc = 1
    for k in range(q - 1):
        dlog[acc] = k
        acc = acc * g % q
    return CharacterTable(q=q, generator=g, dlog=dlog)


# ---------------------------------------------------------------------------
# Weights, amplifiers, character sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothWeight:
    """Bump supported on [X, 4X]: order-3 smoothstep up on [X,2X], flat 1 on
    [2X,3X], smoothstep down on [3X,4X].  X=None gives the zero weight."""

    X: float | None

    @classmethod
    def empty(cls) -> "SmoothWeight":
        return cls(X=None)

    @property
    def support(self) -> tuple[float, float]:
        if self.X is None:
            return (0.0, 0.0)
        return (self.X, 4.0 * self.X)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        out = np.zeros_like(r)
        if self.X is None:
            return out
        x = self.X
        t = np.clip((r - x) / x, 0.0, 1.0)
        rise = _smoothstep3(t)
        t = np.clip((4.0 * x - r) / x, 0.0, 1.0)
        fall = _smoothstep3(t)
        inside = (r >= x) & (r <= 4.0 * x)
        out[inside] = np.minimum(rise, fall)[inside]
        return out


def _smoothstep3(t: np.ndarray) -> np.ndarray:
    # C^3 clamped polynomial step: 35 t^4 - 84 t^5 + 70 t^6 - 20 t^7
    return t**4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))


@dataclass(frozen=True)
class AmplifierSpec:
    """Primes ell in [L, 2L] coprime to the modulus."""

    L: float
    primes: tuple[int, ...]

    def __post_init__(self):
        if self.L <= 1:
            raise ValueError("amplifier length must exceed 1")
        for p in self.primes:
            if not arith.is_prime(p):
                raise ValueError(f"amplifier element {p} is not prime")
            if not self.L <= p <= 2 * self.L:
                raise ValueError(f"amplifier prime {p} outside [L, 2L]")


def amplifier(L: float, q: int) -> AmplifierSpec:
    primes = tuple(
        int(p) for p in arith.primes_upto(int(2 * L)) if p >= L and p % q != 0
    )
    return AmplifierSpec(L=L, primes=primes)


def L_xi(
    f: NewformSeries, table: CharacterTable, j: int, W: SmoothWeight
) -> complex:
    """The twisted smoothed sum sum_r lambda(r) xi_j(r) W(r) / sqrt(r) with
    lambda(r) = a(r)/sqrt(r)."""
    lo, hi = W.support
    if hi > f.N_max:
        raise RangeError(f"weight support reaches {hi}, series ends at {f.N_max}")
    r_lo, r_hi = max(1, math.ceil(lo)), math.floor(hi)
    if r_hi < r_lo:
        return 0j
    r = np.arange(r_lo, r_hi + 1, dtype=np.int64)
    chi = table.values(j)[r % table.q]
    terms = f.a[r] / r.astype(np.float64) * W(r)
    return complex(np.dot(terms, chi))


def _all_L_xi(
    f: NewformSeries, table: CharacterTable, W: SmoothWeight
) -> np.ndarray:
    return np.array(
        [L_xi(f, table, j, W) for j in range(table.n_characters)], dtype=np.complex128
    )


def amplified_moment(
    f: NewformSeries,
    table: CharacterTable,
    target: int,
    amp: AmplifierSpec,
    W: SmoothWeight,
) -> tuple[float, float]:
    """(S, lower): the amplified second moment by direct summation over all
    characters, and the positivity floor (#primes)^2 |L_target|^2 it must
    dominate (the target term of the xi-sum is already that large)."""
    if not 0 <= target < table.n_characters:
        raise ValueError("target character index out of range")
    for ell in amp.primes:
        if ell % table.q == 0:
            raise ValueError(f"amplifier prime {ell} shares a factor with q")
    ls = _all_L_xi(f, table, W)
    ells = np.array(amp.primes, dtype=np.int64)
    target_vals = np.conj(table.values(target)[ells % table.q])
    S = 0.0
    for j in range(table.n_characters):
        inner = np.dot(table.values(j)[ells % table.q], target_vals)
        S += abs(inner) ** 2 * abs(ls[j]) ** 2
    lower = len(amp.primes) ** 2 * abs(ls[target]) ** 2
    return S, lower


def plancherel_identity_check(table: CharacterTable, c: dict[int, complex]) -> float:
    """|sum_xi |c-hat(xi)|^2 - phi(q) sum_a |c(a)|^2|, the exact Plancherel
    identity computed by both orders of summation."""
    q = table.q
    vec = np.zeros(q, dtype=np.complex128)
    for a, value in c.items():
        if a % q == 0:
            raise ValueError("coefficients live on the units of Z/q")
        vec[a % q] = value
    lhs = 0.0
    for j in range(table.n_characters):
        lhs += abs(np.dot(table.values(j), vec)) ** 2
    rhs = (q - 1) * float(np.sum(np.abs(vec) ** 2))
    return abs(lhs - rhs)


def shifted_convolution_expand(
    f: NewformSeries,
    q: int,
    ells: tuple[int, int],
    W: SmoothWeight,
) -> tuple[float, float]:
    """The amplified-moment cross term computed by two independent orders of
    summation.

    spectral_side averages xi(l1) conj(xi(l2)) |L_xi|^2 over all characters;
    arithmetic_side is the direct congruence double sum over r1, r2 in the
    weight support with l1 r1 = l2 r2 (mod q), both coprime to q.  The two
    are the same finite quantity.
    """
    l1, l2 = ells
    table = character_table(q)
    if gcd(l1, q) != 1 or gcd(l2, q) != 1:
        raise ValueError("shift primes must be coprime to q")
    ls = _all_L_xi(f, table, W)
    acc = 0j
    for j in range(table.n_characters):
        vals = table.values(j)
        acc += vals[l1 % q] * np.conj(vals[l2 % q]) * (ls[j] * np.conj(ls[j]))
    spectral = acc / (q - 1)
    if abs(spectral.imag) > 1e-9 * (1.0 + abs(spectral.real)):
        raise IntegrityError("spectral side has a non-negligible imaginary part")

    lo, hi = W.support
    r_lo, r_hi = max(1, math.ceil(lo)), math.floor(hi)
    if r_hi < r_lo:
        return 0.0, 0.0
    r = np.arange(r_lo, r_hi + 1, dtype=np.int64)
    keep = r % q != 0
    r = r[keep]
    terms = f.a[r] / r.astype(np.float64) * W(r)
    cong = (l1 * r[:, None] - l2 * r[None, :]) % q == 0
    arithmetic = float(np.sum((terms[:, None] * terms[None, :])[cong]))
    return float(spectral.real), arithmetic

"""Primitive local representation densities and the mass formula for the two
worked genera (unit determinant and determinant ten).

Density normalization: beta_p = N*_k(p) / p^{2k}, where N*_k counts solutions
of Q = n (mod p^k) with coordinates not all divisible by p.  The level k is
taken high enough for the sequence to stabilize, and stabilization is always
verified, never assumed: either two consecutive levels are counted directly,
or (when p^k is too large to enumerate) a Hensel certificate is checked --
every primitive solution mod p must have a unit gradient, which forces
N*_{j+1} = p^2 N*_j exactly.

beta_infinity = 2*pi*sqrt(n / det G), matching 2*pi*sqrt(n) for the unit
genus and 2*pi*sqrt(n)/sqrt(10) for the determinant-ten genus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from . import arith, class_numbers
from .errors import IntegrityError, RangeError
from .ternary_forms import (
    RAMANUJAN_Q,
    RAMANUJAN_QPRIME,
    THREE_SQUARES,
    TernaryForm,
    automorph_count,
    rep_count,
    rep_counts_upto,
)

THREE_SQUARES_LABEL = "three-squares"
RAMANUJAN_LABEL = "ramanujan-ten"

_HIST_CAP = 32768  # largest modulus for direct solution histograms

ZETA2 = math.pi * math.pi / 6.0


@dataclass(frozen=True)
class GenusData:
    label: str
    classes: tuple[tuple[TernaryForm, int], ...]

    @property
    def det(self) -> int:
        return self.classes[0][0].det


@lru_cache(maxsize=None)
def genus(label: str) -> GenusData:
    """The two worked genera, with automorph counts verified at construction."""
    if label == THREE_SQUARES_LABEL:
        expected = ((THREE_SQUARES, 24),)
    elif label == RAMANUJAN_LABEL:
        expected = ((RAMANUJAN_Q, 8), (RAMANUJAN_QPRIME, 4))
    else:
        raise ValueError(f"unknown genus label {label!r}")
    for form, aut in expected:
        actual = automorph_count(form)
        if actual != aut:
            raise IntegrityError(
                f"automorph count of {form.gram} is {actual}, expected {aut}"
            )
    dets = {form.det for form, _ in expected}
    assert len(dets) == 1
    return GenusData(label=label, classes=expected)


def _admissible(label: str, n: int) -> bool:
    if label == THREE_SQUARES_LABEL:
        return n % 8 in (1, 2, 3, 5, 6)
    return gcd(n, 10) == 1


def _require_admissible(label: str, n: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if not _admissible(label, n):
        raise ValueError(f"n={n} is outside the admissible classes for {label}")


def character_discriminant(label: str, n: int) -> int:
    """Discriminant of the real character attached to the genus at n."""
    if label == THREE_SQUARES_LABEL:
        return -n if n % 8 == 3 else -4 * n
    return -40 * n


def beta_infinity(g: GenusData, n: int) -> float:
    if n < 1:
        raise ValueError("n must be positive")
    return 2.0 * math.pi * math.sqrt(n / g.det)


def beta_p_closed(g: GenusData, n: int, p: int) -> Fraction:
    """Closed-form density at a finite prime, valid on the admissible classes."""
    _require_admissible(g.label, n)
    D = character_discriminant(g.label, n)
    if g.label == THREE_SQUARES_LABEL:
        if p == 2:
            return Fraction(3, 2) / (1 - Fraction(arith.kronecker(D, 2), 2))
        return (1 - Fraction(1, p * p)) / (1 - Fraction(arith.kronecker(D, p), p))
    if p == 2:
        return Fraction(1)
    if p == 5:
        return Fraction(4, 5)
    return (1 - Fraction(1, p * p)) / (1 - Fraction(arith.kronecker(D, p), p))


# ---------------------------------------------------------------------------
# Counting densities
# ---------------------------------------------------------------------------


def _decoupled_axis(Q: TernaryForm) -> int | None:
    """Index of a coordinate with no cross terms, or None."""
    g01, g02, g12 = Q.gram[0][1], Q.gram[0][2], Q.gram[1][2]
    if g01 == 0 and g02 == 0:
        return 0
    if g01 == 0 and g12 == 0:
        return 1
    if g02 == 0 and g12 == 0:
        return 2
    return None


def _fold(conv: np.ndarray, M: int) -> np.ndarray:
    out = conv[:M].copy()
    out[: len(conv) - M] += conv[M:]
    return out


@lru_cache(maxsize=256)
def _value_histogram(Q: TernaryForm, M: int) -> np.ndarray:
    """V[t] = #{(x,y,z) mod M : Q(x,y,z) = t (mod M)} as an int64 array."""
    if M > _HIST_CAP:
        raise RangeError(f"histogram modulus {M} exceeds cap")
    g = Q.gram
    axis = _decoupled_axis(Q)
    t = np.arange(M, dtype=np.int64)
    if all(g[i][j] == 0 for i in range(3) for j in range(3) if i != j):
        hs = [np.bincount((g[i][i] * t * t) % M, minlength=M) for i in range(3)]
        conv = _fold(np.convolve(hs[0], hs[1]), M)
        return _fold(np.convolve(conv, hs[2]), M)
    if axis is None:
        # no decoupled coordinate: full cube, only viable for small M
        if M > 300:
            raise RangeError(f"fully coupled form with modulus {M}")
        X, Y, Z = np.meshgrid(t, t, t, indexing="ij")
        vals = (
            g[0][0] * X * X
            + g[1][1] * Y * Y
            + g[2][2] * Z * Z
            + 2 * (g[0][1] * X * Y + g[0][2] * X * Z + g[1][2] * Y * Z)
        ) % M
        return np.bincount(vals.ravel(), minlength=M)
    others = [i for i in range(3) if i != axis]
    i, j = others
    a, b, c = g[i][i], g[i][j], g[j][j]
    block = np.zeros(M, dtype=np.int64)
    czz = (c * t * t) % M
    for x in range(M):
        block += np.bincount((a * x * x + 2 * b * x * t + czz) % M, minlength=M)
    haxis = np.bincount((g[axis][axis] * t * t) % M, minlength=M)
    return _fold(np.convolve(block, haxis), M)


def _count_level(Q: TernaryForm, p: int, j: int, n: int) -> int:
    """N_j = #{x mod p^j : Q(x) = n (mod p^j)} (all solutions)."""
    if j == 0:
        return 1
    M = p**j
    return int(_value_histogram(Q, M)[n % M])


def _count_all_divisible(Q: TernaryForm, p: int, j: int, n: int) -> int:
    """Solutions mod p^j with all coordinates divisible by p."""
    if j == 1:
        return 1 if n % p == 0 else 0
    if n % (p * p) != 0:
        return 0
    return p**3 * _count_level(Q, p, j - 2, n // (p * p))


def _primitive_count(Q: TernaryForm, p: int, j: int, n: int) -> int:
    return _count_level(Q, p, j, n) - _count_all_divisible(Q, p, j, n)


@lru_cache(maxsize=256)
def _hensel_certificate(Q: TernaryForm, p: int) -> bool:
    """True iff every nonzero x mod p has nonzero gradient 2Gx mod p.

    When this holds, every primitive solution mod p of Q = n is nonsingular,
    so primitive counts satisfy N*_{j+1} = p^2 N*_j exactly for every n and j.
    """
    G = Q.matrix() % p
    t = np.arange(p, dtype=np.int64)
    X, Y, Z = np.meshgrid(t, t, t, indexing="ij")
    V = np.stack([X.ravel(), Y.ravel(), Z.ravel()])
    grad = (2 * (G @ V)) % p
    singular = np.all(grad == 0, axis=0)
    nonzero = np.any(V != 0, axis=0)
    return not bool(np.any(singular & nonzero))


def beta_p_counting(Q: TernaryForm, n: int, p: int) -> Fraction:
    """Density at p by direct counting: N*_k / p^{2k} at a stabilized level k.

    The stabilization level is k = 1 + 2*ord_p(8 * det(G) * n); equality of
    the last two levels is asserted (directly when p^k is enumerable, via the
    Hensel nonsingularity certificate otherwise).
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not arith.is_prime(p):
        raise ValueError(f"p={p} is not prime")
    k = 1 + 2 * arith.p_adic_valuation(8 * Q.det * n, p)
    khi = max(k, 2)
    if p**khi <= _HIST_CAP:
        lo = Fraction(_primitive_count(Q, p, khi - 1, n), p ** (2 * (khi - 1)))
        hi = Fraction(_primitive_count(Q, p, khi, n), p ** (2 * khi))
        if lo != hi:
            raise IntegrityError(
                f"density not stabilized for {Q.gram} at p={p}, n={n}: {lo} != {hi}"
            )
        return hi
    # two cheap levels plus a rigorous lifting certificate
    lo = Fraction(_primitive_count(Q, p, 1, n), p**2)
    hi = Fraction(_primitive_count(Q, p, 2, n), p**4)
    if lo != hi:
        raise IntegrityError(
            f"density not stabilized for {Q.gram} at p={p}, n={n}: {lo} != {hi}"
        )
    if not _hensel_certificate(Q, p):
        raise IntegrityError(
            f"no Hensel certificate for {Q.gram} at p={p}; cannot verify level {k}"
        )
    return hi


# ---------------------------------------------------------------------------
# Mass formula
# ---------------------------------------------------------------------------


def imprimitive_L1_correction(D0: int, f: int) -> Fraction:
    """prod_{p | f} (1 - (D0/p)/p): converts L(1, primitive) to the
    imprimitive Kronecker L-value at conductor f."""
    if not arith.is_fundamental_discriminant(D0):
        raise ValueError(f"D0={D0} is not fundamental")
    if f < 1:
        raise ValueError("f must be >= 1")
    out = Fraction(1)
    for p, _ in arith.factorize(f).factors:
        out *= 1 - Fraction(arith.kronecker(D0, p), p)
    return out


@dataclass(frozen=True)
class MassCheck:
    n: int
    lhs: Fraction
    rhs: float
    residual: float
    tail_bound: float


@dataclass(frozen=True)
class DensityReport:
    n: int
    beta_inf: float
    beta_p: dict[int, Fraction]
    truncation_prime: int
    product: float
    tail_bound: float


def _bad_primes(g: GenusData, n: int) -> list[int]:
    bad = {2}
    for p, _ in arith.factorize(g.det).factors:
        bad.add(p)
    for p, _ in arith.factorize(n).factors:
        bad.add(p)
    return sorted(bad)


def _euler_product(g: GenusData, n: int, P: int, primes: np.ndarray | None = None):
    """(tail-corrected product over the finite primes, certified error bound).

    Bad primes use the counting density; good primes up to P use the closed
    form, vectorized through a character value table.  The tail beyond P is
    an exact ratio rather than an estimate, pinned against the one-period
    closed L(1) value:
    prod_{p>P} beta_p = L(1,chi) * prod_{p<=P}(1 - chi(p)/p)
                        / (zeta(2) * prod_{p<=P}(1 - p^-2)),
    so the certified bound only carries float rounding, not a series tail.
    """
    D = character_discriminant(g.label, n)
    if primes is None:
        primes = arith.primes_upto(P)
    bad = _bad_primes(g, n)
    chi = arith.character_values(D, P + 1)[primes].astype(np.float64)
    pf = primes.astype(np.float64)
    good = ~np.isin(primes, bad)
    factors = (1.0 - 1.0 / pf**2) / (1.0 - chi / pf)
    prod_good = float(np.prod(factors[good]))
    prod_bad = 1.0
    for p in bad:
        if p > P:
            continue
        prod_bad *= float(beta_p_counting(g.classes[0][0], n, p))
    L1 = class_numbers.dirichlet_L1_any(D)
    log_tail = (
        math.log(L1)
        + float(np.sum(np.log1p(-chi / pf)))
        - math.log(ZETA2)
        - float(np.sum(np.log1p(-1.0 / pf**2)))
    )
    product = prod_bad * prod_good * math.exp(log_tail)
    tail_bound = 1e-9 + len(primes) * 1e-15
    return product, tail_bound


def mass_formula_check(
    g: GenusData, n: int, truncation_prime: int = 100_000, _rep=None, _primes=None
) -> MassCheck:
    """Weighted primitive class average against the truncated density product.

    lhs = (sum r*(n,Q)/aut) / (sum 1/aut), exact.  rhs = beta_inf * prod of
    beta_p over p <= truncation_prime.  residual = |lhs - rhs| / lhs, which
    must come in under the certified tail bound.
    """
    _require_admissible(g.label, n)
    if not arith.is_squarefree(n):
        raise ValueError(f"n={n} must be squarefree")
    if _rep is None:
        _rep = {form: rep_count(form, n).count_primitive for form, _ in g.classes}
    num = sum(Fraction(_rep[form], aut) for form, aut in g.classes)
    den = sum(Fraction(1, aut) for _, aut in g.classes)
    lhs = num / den
    product, tail_bound = _euler_product(g, n, truncation_prime, _primes)
    rhs = beta_infinity(g, n) * product
    if lhs == 0:
        residual = abs(rhs)
    else:
        residual = abs(float(lhs) - rhs) / float(lhs)
    return MassCheck(n=n, lhs=lhs, rhs=rhs, residual=residual, tail_bound=tail_bound)


def density_report(
    g: GenusData, n: int, truncation_prime: int = 100_000, p_detail_max: int = 50
) -> DensityReport:
    """Densities at small primes plus the truncated product and its tail bound."""
    _require_admissible(g.label, n)
    beta_map: dict[int, Fraction] = {}
    form = g.classes[0][0]
    for p in map(int, arith.primes_upto(p_detail_max)):
        beta_map[p] = beta_p_counting(form, n, p)
    product, tail_bound = _euler_product(g, n, truncation_prime)
    return DensityReport(
        n=n,
        beta_inf=beta_infinity(g, n),
        beta_p=beta_map,
        truncation_prime=truncation_prime,
        product=beta_infinity(g, n) * product,
        tail_bound=tail_bound,
    )


def mass_survey(
    g: GenusData, n_max: int, truncation_prime: int = 100_000
) -> list[MassCheck]:
    """mass_formula_check for every admissible squarefree n <= n_max,
    with representation counts batched across the survey."""
    reps = {form: rep_counts_upto(form, n_max)[1] for form, _ in g.classes}
    primes = arith.primes_upto(truncation_prime)
    sf = arith.squarefree_mask_upto(n_max)
    out = []
    for n in range(1, n_max + 1):
        if not sf[n] or not _admissible(g.label, n):
            continue
        rep = {form: int(reps[form][n]) for form, _ in g.classes}
        out.append(
            mass_formula_check(g, n, truncation_prime, _rep=rep, _primes=primes)
        )
    return out


def exact_mass_identity_rows(n_max: int) -> list[tuple[int, int, int, int, int]]:
    """Rows (n, r*(n,Q), r*(n,Q'), r*+2r*', 2h(-40n)) over squarefree n
    coprime to 10 -- the integer-exact form of the determinant-ten mass formula."""
    rq = rep_counts_upto(RAMANUJAN_Q, n_max)[1]
    rqp = rep_counts_upto(RAMANUJAN_QPRIME, n_max)[1]
    sf = arith.squarefree_mask_upto(n_max)
    rows = []
    for n in range(1, n_max + 1):
        if not sf[n] or gcd(n, 10) != 1:
            continue
        h = class_numbers.class_number(-40 * n)
        rows.append((n, int(rq[n]), int(rqp[n]), int(rq[n]) + 2 * int(rqp[n]), 2 * h))
    return rows

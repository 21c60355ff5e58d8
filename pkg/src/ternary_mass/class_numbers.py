"""Reduced positive binary quadratic forms, class numbers h(D), and L(1, (D/.))
by two independent routes.

Conventions: equivalence is proper (SL_2) throughout.  A positive definite
form (a,b,c) is reduced iff |b| <= a <= c with b >= 0 whenever |b| = a or
a = c; this makes representatives unique and sortable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from . import arith
from .errors import RangeError


@dataclass(frozen=True, order=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.discriminant < 0

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if b < 0 and (abs(b) == a or a == c):
            return False
        return True

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y


def _check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 in (2, 3):
        raise ValueError(f"{D} is not a negative discriminant")


def reduce_form(form: BinaryForm) -> BinaryForm:
    """Gauss reduction to the unique reduced SL_2-representative."""
    a, b, c = form.a, form.b, form.c
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("form must be positive definite")
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b < -a:
            # translate b into [-a, a]
            r = (b + a) % (2 * a)
            k = (b + a - r) // (2 * a)
            c = c - k * b + k * k * a
            b = b - 2 * k * a
            continue
        if (a == c and b < 0) or b == -a:
            b = -b
            continue
        return BinaryForm(a, b, c)


def reduced_forms(D: int) -> list[BinaryForm]:
    """One reduced representative per proper class of primitive forms of
    discriminant D, sorted lexicographically by (a, b, c)."""
    _check_discriminant(D)
    amax = isqrt(-D // 3)
    a = np.arange(1, amax + 1, dtype=np.int64)
    b = np.arange(-amax, amax + 1, dtype=np.int64)
    A, B = np.meshgrid(a, b, indexing="ij")
    A = A.ravel()
    B = B.ravel()
    keep = (np.abs(B) <= A) & ((B - D) % 2 == 0)
    A, B = A[keep], B[keep]
    num = B * B - D
    q = 4 * A
    keep = num % q == 0
    A, B, num, q = A[keep], B[keep], num[keep], q[keep]
    C = num // q
    keep = C >= A
    A, B, C = A[keep], B[keep], C[keep]
    keep = (B >= 0) | ((np.abs(B) != A) & (A != C))
    A, B, C = A[keep], B[keep], C[keep]
    keep = np.gcd(np.gcd(A, np.abs(B)), C) == 1
    A, B, C = A[keep], B[keep], C[keep]
    forms = sorted(BinaryForm(int(x), int(y), int(z)) for x, y, z in zip(A, B, C))
    return forms


def class_number(D: int) -> int:
    """h(D): number of proper classes of primitive positive forms of disc D."""
    return len(reduced_forms(D))


def unit_count(D: int) -> int:
    """Number of proper automorphs w of a positive form of discriminant D."""
    _check_discriminant(D)
    if D == -3:
        return 6
    if D == -4:
        return 4
    return 2


def _character_sum(D: int) -> int:
    """S = sum_{a=1}^{|D|-1} (D/a) * a, exact."""
    q = -D
    if q > 2**31:
        raise RangeError(f"|D|={q} too large for the one-period character sum")
    chi = arith.character_values(D, q).astype(np.int64)
    return int(np.dot(chi, np.arange(q, dtype=np.int64)))


def dirichlet_L1(D: int, method: str = "class-number") -> float:
    """L(1, (D/.)) for fundamental D < 0 by one of two independent methods.

    "class-number": 2*pi*h(D) / (w * sqrt(|D|)), h from reduced-form counting.
    "character-sum": the exact one-period closed sum for the odd primitive
    character, L(1, chi_D) = -pi * S / |D|^{3/2} with S = sum (D/a)*a.
    Both are exact up to float rounding (no series truncation).
    """
    _check_discriminant(D)
    if not arith.is_fundamental_discriminant(D):
        raise ValueError(
            f"D={D} is not fundamental; decompose via classify_discriminant and "
            "apply local_densities.imprimitive_L1_correction"
        )
    if method == "class-number":
        h = class_number(D)
        w = unit_count(D)
        return 2.0 * math.pi * h / (w * math.sqrt(-D))
    if method == "character-sum":
        S = _character_sum(D)
        return -math.pi * S / (-D) ** 1.5
    raise ValueError(f"unknown method {method!r}")


def dirichlet_L1_any(D: int) -> float:
    """L(1, (D/.)) for any negative discriminant, imprimitive symbols included.

    For non-fundamental D = f^2 * D0 the Kronecker symbol (D/.) is the
    character mod |D0| with the primes of f removed, so
    L(1,(D/.)) = L(1,(D0/.)) * prod_{p | f} (1 - (D0/p)/p).
    """
    info = arith.classify_discriminant(D)
    if info.kind == arith.NOT_A_DISCRIMINANT:
        raise ValueError(f"{D} is not a discriminant")
    base = dirichlet_L1(info.fundamental, method="character-sum")
    corr = Fraction(1)
    if info.conductor > 1:
        for p, _ in arith.factorize(info.conductor).factors:
            corr *= 1 - Fraction(arith.kronecker(info.fundamental, p), p)
    return base * float(corr)

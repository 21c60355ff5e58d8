"""Positive ternary quadratic forms: exact representation counts over Z and
over real quadratic rings Z[sqrt(m)], plus proper automorph counting.

A form is stored by its integer Gram matrix G with Q(v) = v^T G v, so the
even-diagonal coefficient matrix of the classical convention is 2G and the
classical determinant d equals det(2G) = 8 det(G).  Forms with odd
cross-coefficients (half-integral G) are rejected.

Enumeration uses exact integer bounds (isqrt plus a unit of safety margin,
then exact equality tests); no floating point decides a count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .errors import RangeError

_BOX_LIMIT = 3 * 10**8  # max enumeration cells for one call


@dataclass(frozen=True)
class TernaryForm:
    """Positive definite ternary form given by a symmetric integer Gram matrix."""

    gram: tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

    def __post_init__(self):
        g = self.gram
        if len(g) != 3 or any(len(row) != 3 for row in g):
            raise ValueError("gram must be 3x3")
        if any(not isinstance(g[i][j], (int, np.integer)) for i in range(3) for j in range(3)):
            raise ValueError("gram entries must be integers")
        g = tuple(tuple(int(x) for x in row) for row in g)
        object.__setattr__(self, "gram", g)
        if any(g[i][j] != g[j][i] for i in range(3) for j in range(3)):
            raise ValueError("gram must be symmetric")
        m1 = g[0][0]
        m2 = g[0][0] * g[1][1] - g[0][1] ** 2
        if not (m1 > 0 and m2 > 0 and self.det > 0):
            raise ValueError("gram must be positive definite")

    @classmethod
    def from_matrix(cls, mat) -> "TernaryForm":
        return cls(tuple(tuple(int(x) for x in row) for row in mat))

    @classmethod
    def diagonal(cls, d1: int, d2: int, d3: int) -> "TernaryForm":
        return cls(((d1, 0, 0), (0, d2, 0), (0, 0, d3)))

    @property
    def det(self) -> int:
        """det(G); the classical even-matrix determinant is 8*det(G)."""
        (a, b, c), (_, d, e), (_, _, f) = self.gram
        return a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c)

    def adjugate_diagonal(self) -> tuple[int, int, int]:
        (a, b, c), (_, d, e), (_, _, f) = self.gram
        return (d * f - e * e, a * f - c * c, a * d - b * b)

    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    def __call__(self, x: int, y: int, z: int) -> int:
        (a, b, c), (_, d, e), (_, _, f) = self.gram
        return a * x * x + d * y * y + f * z * z + 2 * (b * x * y + c * x * z + e * y * z)


THREE_SQUARES = TernaryForm.diagonal(1, 1, 1)
RAMANUJAN_Q = TernaryForm.diagonal(1, 1, 10)
RAMANUJAN_QPRIME = TernaryForm(((2, 0, -1), (0, 2, 0), (-1, 0, 3)))
SPINOR_A = TernaryForm.diagonal(1, 3, 36)
SPINOR_B = TernaryForm.diagonal(3, 4, 9)


@dataclass(frozen=True)
class RepResult:
    n: object  # int, or a ring element (a, b) for real quadratic counts
    count_all: int
    count_primitive: int

    def __post_init__(self):
        assert self.count_primitive <= self.count_all


def _coordinate_bounds(Q: TernaryForm, n: int) -> tuple[int, int, int]:
    """Exact-safe bounds: |v_i| <= sqrt(n * adj_ii / det) + 1."""
    det = Q.det
    return tuple(isqrt(n * adj // det) + 1 for adj in Q.adjugate_diagonal())


def _plane_arrays(Q: TernaryForm, by: int, bz: int):
    (_, g01, g02), (_, g11, g12), (_, _, g22) = Q.gram
    Y, Z = np.meshgrid(
        np.arange(-by, by + 1, dtype=np.int64),
        np.arange(-bz, bz + 1, dtype=np.int64),
        indexing="ij",
    )
    base = g11 * Y * Y + 2 * g12 * Y * Z + g22 * Z * Z
    lin = 2 * (g01 * Y + g02 * Z)
    gyz = np.gcd(np.abs(Y), np.abs(Z))
    return Y, Z, base, lin, gyz


def rep_counts_upto(Q: TernaryForm, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Representation counts r(n,Q) and r*(n,Q) for all 0 <= n <= N at once.

    Returns (all_counts, primitive_counts) as int64 arrays of length N+1.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    bx, by, bz = _coordinate_bounds(Q, N)
    if (2 * bx + 1) * (2 * by + 1) * (2 * bz + 1) > _BOX_LIMIT:
        raise RangeError(f"enumeration box for N={N} exceeds limit")
    g00 = Q.gram[0][0]
    _, _, base, lin, gyz = _plane_arrays(Q, by, bz)
    counts_all = np.zeros(N + 1, dtype=np.int64)
    counts_prim = np.zeros(N + 1, dtype=np.int64)
    for x in range(-bx, bx + 1):
        vals = base + x * lin + g00 * x * x
        mask = vals <= N
        v = vals[mask]
        counts_all += np.bincount(v, minlength=N + 1)
        gmask = np.gcd(gyz[mask], abs(x)) == 1
        counts_prim += np.bincount(v[gmask], minlength=N + 1)
    return counts_all, counts_prim


def solutions(Q: TernaryForm, n: int) -> np.ndarray:
    """All integer triples with Q(v) = n, as an (r, 3) int64 array."""
    if n < 0:
        return np.empty((0, 3), dtype=np.int64)
    bx, by, bz = _coordinate_bounds(Q, n)
    if (2 * bx + 1) * (2 * by + 1) * (2 * bz + 1) > _BOX_LIMIT:
        raise RangeError(f"enumeration box for n={n} exceeds limit")
    g00 = Q.gram[0][0]
    Y, Z, base, lin, _ = _plane_arrays(Q, by, bz)
    out = []
    for x in range(-bx, bx + 1):
        vals = base + x * lin + g00 * x * x
        ys, zs = np.nonzero(vals == n)
        if len(ys):
            trip = np.empty((len(ys), 3), dtype=np.int64)
            trip[:, 0] = x
            trip[:, 1] = Y[ys, zs]
            trip[:, 2] = Z[ys, zs]
            out.append(trip)
    if not out:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(out)


def rep_count(Q: TernaryForm, n: int) -> RepResult:
    """Exact r(n,Q) and primitive r*(n,Q) by exhaustive ellipsoid enumeration."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    sols = solutions(Q, n)
    total = len(sols)
    if total == 0:
        return RepResult(n=n, count_all=0, count_primitive=0)
    g = np.gcd(np.gcd(np.abs(sols[:, 0]), np.abs(sols[:, 1])), np.abs(sols[:, 2]))
    return RepResult(n=n, count_all=total, count_primitive=int(np.count_nonzero(g == 1)))


@lru_cache(maxsize=64)
def automorph_count(Q: TernaryForm) -> int:
    """Number of proper automorphs: U in SL_3(Z) with U^T G U = G.

    Column i of U must satisfy Q(col) = G_ii, so the search runs over the
    finite solution sets of the three diagonal values.
    """
    G = Q.matrix()
    cols = [solutions(Q, int(G[i, i])) for i in range(3)]
    s2, s3 = cols[1], cols[2]
    gs2 = s2 @ G  # rows: (G u2)^T
    gs3 = s3 @ G
    count = 0
    for u1 in cols[0]:
        gu1 = G @ u1
        m2 = s2[gs2 @ u1 == G[0, 1]]
        if not len(m2):
            continue
        mask3_u1 = gs3 @ u1 == G[0, 2]
        for u2 in m2:
            m3 = s3[mask3_u1 & (gs3 @ u2 == G[1, 2])]
            if not len(m3):
                continue
            cross = np.cross(u1, u2)
            count += int(np.count_nonzero(m3 @ cross == 1))
    return count


# ---------------------------------------------------------------------------
# Real quadratic rings Z[sqrt(m)]
# ---------------------------------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _lattice_index_2d(rows: list[tuple[int, int]]) -> int:
    """Index [Z^2 : L] of the sublattice spanned by the given rows (0 if rank < 2)."""
    e11 = e12 = e22 = 0
    for u, v in rows:
        while u:
            if e11 == 0:
                e11, e12 = u, v
                u, v = 0, 0
                break
            g, s, t = _xgcd(e11, u)
            new12 = s * e12 + t * v
            v = (-u // g) * e12 + (e11 // g) * v
            e11, e12 = g, new12
            u = 0
        e22 = gcd(e22, v)
    return abs(e11 * e22)


@dataclass(frozen=True)
class RealQuadraticRing:
    """Z[sqrt(m)] for squarefree m = 2,3 (mod 4), with exact embedding signs.

    Elements are pairs (a, b) meaning a + b*sqrt(m); the embeddings are
    sigma1 = a + b*sqrt(m), sigma2 = a - b*sqrt(m).  All sign decisions are
    made by exact integer comparisons (a >= |b|*sqrt(m)  <=>  a >= 0 and
    a^2 >= m b^2, equality impossible for b != 0 since m is not a square).
    """

    m: int

    def __post_init__(self):
        if self.m < 2 or self.m % 4 not in (2, 3):
            raise ValueError("m must be >= 2 and = 2,3 (mod 4)")
        from .arith import is_squarefree

        if not is_squarefree(self.m):
            raise ValueError("m must be squarefree")

    def mul(self, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
        return (x[0] * y[0] + self.m * x[1] * y[1], x[0] * y[1] + x[1] * y[0])

    def square(self, x: tuple[int, int]) -> tuple[int, int]:
        return (x[0] * x[0] + self.m * x[1] * x[1], 2 * x[0] * x[1])

    def is_totally_nonnegative(self, x: tuple[int, int]) -> bool:
        a, b = x
        return a >= 0 and a * a >= self.m * b * b

    def is_totally_positive(self, x: tuple[int, int]) -> bool:
        a, b = x
        return a > 0 and a * a > self.m * b * b

    def element_is_unit_ideal(self, elems: list[tuple[int, int]]) -> bool:
        """Whether the ideal generated by the given elements is all of Z[sqrt(m)].

        The ideal is the Z-lattice spanned by e and e*sqrt(m) for each
        generator e; it is the unit ideal iff that lattice has index 1.
        """
        rows: list[tuple[int, int]] = []
        for a, b in elems:
            rows.append((a, b))
            rows.append((b * self.m, a))
        return _lattice_index_2d(rows) == 1


def _coerce_element(n) -> tuple[int, int]:
    if isinstance(n, (int, np.integer)):
        return (int(n), 0)
    a, b = n
    return (int(a), int(b))


def rep_count_real_quadratic(R: RealQuadraticRing, n) -> RepResult:
    """Count (x,y,z) in Z[sqrt(m)]^3 with x^2 + y^2 + z^2 = n.

    n must be totally positive.  count_primitive counts solutions whose
    coordinate ideal (x,y,z) is the whole ring.
    """
    n0, n1 = _coerce_element(n)
    m = R.m
    if not R.is_totally_positive((n0, n1)):
        raise ValueError(f"n = {(n0, n1)} is not totally positive")
    s1 = math.sqrt(n0 + n1 * math.sqrt(m))
    s2 = math.sqrt(n0 - n1 * math.sqrt(m))
    amax = int((s1 + s2) / 2) + 2
    bmax = int((s1 + s2) / (2 * math.sqrt(m))) + 2
    if (2 * amax + 1) * (2 * bmax + 1) > 10**8:
        raise RangeError("real-quadratic enumeration box too large")
    A, B = np.meshgrid(
        np.arange(-amax, amax + 1, dtype=np.int64),
        np.arange(-bmax, bmax + 1, dtype=np.int64),
        indexing="ij",
    )
    A, B = A.ravel(), B.ravel()
    S0 = A * A + m * B * B
    S1 = 2 * A * B
    r0 = n0 - S0
    r1 = n1 - S1
    keep = (r0 >= 0) & (r0 * r0 >= m * r1 * r1)
    A, B, S0, S1 = A[keep], B[keep], S0[keep], S1[keep]
    ncand = len(A)
    if ncand == 0:
        return RepResult(n=(n0, n1), count_all=0, count_primitive=0)

    # encode square values (S0, S1) as single keys for sorted lookup
    s1lo, s1hi = int(S1.min()), int(S1.max())
    width = s1hi - s1lo + 1
    keys = S0 * width + (S1 - s1lo)
    order = np.argsort(keys, kind="stable")
    skeys = keys[order]
    ukeys, starts, counts = np.unique(skeys, return_index=True, return_counts=True)
    s0max = int(S0.max())

    count_all = 0
    triples: list[tuple[int, int, int]] = []  # candidate indices (ix, iy, iz)
    for i in range(ncand):
        rem0 = n0 - int(S0[i]) - S0
        rem1 = n1 - int(S1[i]) - S1
        valid = (rem0 >= 0) & (rem0 * rem0 >= m * rem1 * rem1)
        valid &= (rem0 <= s0max) & (rem1 >= s1lo) & (rem1 <= s1hi)
        if not valid.any():
            continue
        k2 = rem0 * width + (rem1 - s1lo)
        k2[~valid] = -1
        pos = np.searchsorted(ukeys, k2)
        pos[pos >= len(ukeys)] = 0
        hit = valid & (ukeys[pos] == k2)
        js = np.nonzero(hit)[0]
        if not len(js):
            continue
        count_all += int(counts[pos[js]].sum())
        for j in js:
            u = pos[j]
            for t in range(starts[u], starts[u] + counts[u]):
                triples.append((i, int(j), int(order[t])))

    count_prim = 0
    for ix, iy, iz in triples:
        elems = [
            (int(A[ix]), int(B[ix])),
            (int(A[iy]), int(B[iy])),
            (int(A[iz]), int(B[iz])),
        ]
        if R.element_is_unit_ideal(elems):
            count_prim += 1
    return RepResult(n=(n0, n1), count_all=count_all, count_primitive=count_prim)

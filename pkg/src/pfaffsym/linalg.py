"""Determinants and Pfaffians over exact commutative rings.

Entries may be ints, rationals (``mpq``/``Fraction``), :class:`Poly` or
:class:`RatFun`; the routines only use ``+``, ``-``, ``*`` and, for the
fraction-free elimination, exact division.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from gmpy2 import mpq

from .ring import Poly, RatFun

COFACTOR_MAX_DIM = 4


class DimensionError(ValueError):
    pass


class Matrix:
    """Rectangular array of ring elements."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries: Sequence[Sequence]):
        rows = [tuple(r) for r in entries]
        cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionError("ragged matrix")
        self.entries = tuple(rows)
        self.rows = len(rows)
        self.cols = cols

    @classmethod
    def from_function(cls, rows: int, cols: int, f) -> "Matrix":
        return cls([[f(i, j) for j in range(cols)] for i in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.from_function(n, n, lambda i, j: 1 if i == j else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.entries))) if self.rows else Matrix([])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        oc = other.transpose().entries
        return Matrix([[_dot(r, c) for c in oc] for r in self.entries])

    def map(self, f) -> "Matrix":
        return Matrix([[f(x) for x in r] for r in self.entries])

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.entries == other.entries

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.entries]})"


class SkewMatrix:
    """Skew-symmetric matrix stored by its strict upper triangle."""

    __slots__ = ("n", "_upper")

    def __init__(self, n: int, upper):
        """``upper`` is a callable ``(i, j) -> entry`` or a mapping, 0-based, i < j."""
        self.n = n
        if callable(upper):
            self._upper = {(i, j): upper(i, j) for i in range(n) for j in range(i + 1, n)}
        else:
            self._upper = {(i, j): upper.get((i, j), 0) for i in range(n) for j in range(i + 1, n)}

    @classmethod
    def from_matrix(cls, m: Matrix, check: bool = True) -> "SkewMatrix":
        if m.rows != m.cols:
            raise DimensionError("skew matrix must be square")
        if check:
            for i in range(m.rows):
                if m[i, i] != 0:
                    raise ValueError("diagonal of a skew matrix must vanish")
                for j in range(i + 1, m.rows):
                    if m[j, i] != -m[i, j]:
                        raise ValueError(f"entries ({i},{j}) and ({j},{i}) are not opposite")
        return cls(m.rows, lambda i, j: m[i, j])

    def __getitem__(self, ij):
        i, j = ij
        if i < j:
            return self._upper[(i, j)]
        if i > j:
            return -self._upper[(j, i)]
        return 0

    def to_matrix(self) -> Matrix:
        return Matrix.from_function(self.n, self.n, lambda i, j: self[i, j])

    def principal(self, idx: Sequence[int]) -> "SkewMatrix":
        idx = list(idx)
        return SkewMatrix(len(idx), lambda i, j: self[idx[i], idx[j]])

    def map(self, f) -> "SkewMatrix":
        return SkewMatrix(self.n, {k: f(v) for k, v in self._upper.items()})

    def __repr__(self):
        return f"SkewMatrix({self.n}, {self._upper})"


def _dot(r, c):
    acc = 0
    for x, y in zip(r, c):
        acc = acc + x * y
    return acc


def _is_zero(x) -> bool:
    if isinstance(x, (Poly, RatFun)):
        return x.is_zero()
    return x == 0


def _exact_div(a, b):
    if isinstance(a, Poly) or isinstance(b, Poly):
        return Poly.lift(a).exact_divide(b)
    if isinstance(a, RatFun) or isinstance(b, RatFun):
        return RatFun.lift(a) / b
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact integer division in elimination")
        return q
    return mpq(a) / mpq(b)


# determinants


def determinant(M: Matrix, method: str | None = None):
    """Exact determinant.

    ``method`` is ``"cofactor"`` (row expansion memoized over column sets),
    ``"bareiss"`` (fraction-free elimination) or ``None``: cofactor up to
    dimension 4, Bareiss above.  RatFun entries above dimension 4 are cleared
    to a polynomial matrix first.
    """
    if not isinstance(M, Matrix):
        M = Matrix(M)
    if M.rows != M.cols:
        raise DimensionError(f"determinant of non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    if n == 0:
        return 1
    if method is None:
        method = "cofactor" if n <= COFACTOR_MAX_DIM else "bareiss"
    if method == "cofactor":
        return _det_cofactor(M.entries)
    if method != "bareiss":
        raise ValueError(f"unknown determinant method {method!r}")
    if any(isinstance(x, RatFun) for r in M.entries for x in r):
        return _det_ratfun_cleared(M)
    return _det_bareiss([list(r) for r in M.entries])


def _det_cofactor(rows):
    n = len(rows)
    # minors of the last k rows indexed by their column set
    cur = {0: 1}
    for i in range(n - 1, -1, -1):
        row = rows[i]
        nxt = {}
        for mask, minor in cur.items():
            if _is_zero(minor):
                continue
            sign = 1
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    sign = -sign
                    continue
                e = row[j]
                if _is_zero(e):
                    continue
                term = e * minor if sign > 0 else -(e * minor)
                key = mask | bit
                prev = nxt.get(key)
                nxt[key] = term if prev is None else prev + term
        cur = nxt
    return cur.get((1 << n) - 1, 0)


def _det_bareiss(a):
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if _is_zero(a[k][k]):
            for r in range(k + 1, n):
                if not _is_zero(a[r][k]):
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = pivot * a[i][j] - aik * a[k][j]
                a[i][j] = _exact_div(num, prev) if not (isinstance(prev, int) and prev == 1) else num
        prev = pivot
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def _det_ratfun_cleared(M: Matrix):
    rows = []
    scale = Poly.const(1)
    for r in M.entries:
        den = Poly.const(1)
        for x in r:
            if isinstance(x, RatFun) and x.den != 1:
                den = den * x.den
        scale = scale * den
        rows.append([RatFun.lift(x).num * den.exact_divide(RatFun.lift(x).den) for x in r])
    return RatFun(_det_bareiss(rows), scale)


# Pfaffians


def matchings(n2: int):
    """Yield ``(sign, pairs)`` for every perfect matching of range(n2).

    Pairs are increasing and listed by increasing first element; the sign is
    that of the permutation (s1 s2 ... s_2n) read off the pairs.
    """
    if n2 % 2:
        raise DimensionError("matchings need an even number of points")

    def rec(rest):
        if not rest:
            yield 1, ()
            return
        first = rest[0]
        for k in range(1, len(rest)):
            other = rest[k]
            # moving `other` next to `first` crosses k-1 points
            s = -1 if (k - 1) % 2 else 1
            remaining = rest[1:k] + rest[k + 1:]
            for sign, pairs in rec(remaining):
                yield s * sign, ((first, other),) + pairs

    yield from rec(tuple(range(n2)))


def permutation_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    seen = [False] * len(seq)
    for i in range(len(seq)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = seq[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _as_skew(A) -> SkewMatrix:
    if isinstance(A, SkewMatrix):
        return A
    if not isinstance(A, Matrix):
        A = Matrix(A)
    return SkewMatrix.from_matrix(A)


def pfaffian_matchings(A) -> object:
    """Pfaffian as the signed sum over all perfect matchings."""
    A = _as_skew(A)
    if A.n % 2:
        raise DimensionError("Pfaffian of an odd-dimensional matrix")
    total = 0
    for sign, pairs in matchings(A.n):
        term = 1
        for i, j in pairs:
            term = term * A[i, j]
            if _is_zero(term):
                break
        else:
            total = total + term if sign > 0 else total - term
    return total


def pfaffian_expansion(A) -> object:
    """Pfaffian by expansion along the last row, memoized on index sets."""
    A = _as_skew(A)
    n = A.n
    if n % 2:
        raise DimensionError("Pfaffian of an odd-dimensional matrix")
    memo: dict[tuple, object] = {}

    def pf(idx: tuple):
        if not idx:
            return 1
        hit = memo.get(idx)
        if hit is not None:
            return hit
        last = idx[-1]
        total = 0
        for k in range(len(idx) - 1):
            e = A[idx[k], last]
            if _is_zero(e):
                continue
            sub = pf(idx[:k] + idx[k + 1:-1])
            if _is_zero(sub):
                continue
            term = e * sub
            # (-1)^(k-1) with 1-based k
            total = total + term if k % 2 == 0 else total - term
        memo[idx] = total
        return total

    return pf(tuple(range(n)))


def pfaffian(A):
    return pfaffian_expansion(A)


def submatrix(M: Matrix, rows: Sequence[int] | None, cols: Sequence[int] | None) -> Matrix:
    """Rows ``rows`` and columns ``cols`` (0-based, strictly increasing; None = all)."""
    if not isinstance(M, Matrix):
        M = Matrix(M)
    rows = list(range(M.rows)) if rows is None else list(rows)
    cols = list(range(M.cols)) if cols is None else list(cols)
    for idx, bound, what in ((rows, M.rows, "row"), (cols, M.cols, "column")):
        if any(i < 0 or i >= bound for i in idx):
            raise IndexError(f"{what} index out of range")
        if any(u >= v for u, v in zip(idx, idx[1:])):
            raise ValueError(f"{what} indices must be strictly increasing")
    return Matrix([[M[i, j] for j in cols] for i in rows])


def congruence(T: Matrix, A: SkewMatrix) -> SkewMatrix:
    """The skew matrix T A T^t, entry (i,j) = sum_{k<l} a_kl det T[{i,j},{k,l}]."""
    if not isinstance(T, Matrix):
        T = Matrix(T)
    A = _as_skew(A)
    if T.cols != A.n:
        raise DimensionError(f"T has {T.cols} columns but A has size {A.n}")

    def entry(i, j):
        acc = 0
        for k in range(A.n):
            for l in range(k + 1, A.n):
                akl = A[k, l]
                if _is_zero(akl):
                    continue
                minor = T[i, k] * T[j, l] - T[i, l] * T[j, k]
                acc = acc + akl * minor
        return acc

    return SkewMatrix(T.rows, entry)


def msf_lhs(T: Matrix, A: SkewMatrix):
    """Sum over 2n-subsets I of Pf(A[I,I]) det(T[:, I])."""
    if not isinstance(T, Matrix):
        T = Matrix(T)
    A = _as_skew(A)
    total = 0
    for I in combinations(range(A.n), T.rows):
        pf = pfaffian_expansion(A.principal(I))
        if _is_zero(pf):
            continue
        total = total + pf * determinant(submatrix(T, None, I))
    return total


def pfaffian_cleared(nums, den_factors, n2: int):
    """Pfaffian of entries ``nums[i,j] / prod(den_factors[i,j])`` as a RatFun.

    The common denominator is the smallest multiset of factors covering every
    matching, so shared factors such as (1 - ab x_i^2) are not repeated.  Each
    matching term is multiplied by the factors its pairs do not supply.
    """
    terms = []
    common: Counter = Counter()
    for sign, pairs in matchings(n2):
        used: Counter = Counter()
        term = Poly.const(1)
        for i, j in pairs:
            term = term * nums[i, j]
            used.update(den_factors[i, j])
            if term.is_zero():
                break
        common |= used
        if not term.is_zero():
            terms.append((sign, term, used))
    total = Poly()
    for sign, term, used in terms:
        for f, k in (common - used).items():
            for _ in range(k):
                term = term * f
        total = total + term if sign > 0 else total - term
    den = Poly.const(1)
    for f, k in common.items():
        for _ in range(k):
            den = den * f
    return RatFun(total, den)


def to_fraction(x) -> Fraction:
    return Fraction(int(mpq(x).numerator), int(mpq(x).denominator))

"""Symmetric-function constructors: Schur and power-sum polynomials, the
one-row generator families, weighted Schur sums, the alternant-type
determinants V^n, U^n, a_{alpha,beta} and f_n, power-sum decomposition,
the two-variable oddness criterion and the theta transforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Mapping, Sequence

from gmpy2 import mpq

from .combinat import (
    Partition,
    conjugate,
    enumerate_Pn,
    enumerate_partitions,
    factorial_z,
    omega_weight,
    partitions_of,
    staircase_shift,
)
from .linalg import Matrix, determinant
from .ring import Poly, RatFun, SeriesCap, var, xvars

DESK_MAX_DEGREE = 8
DESK_MAX_VARS = 8

WEIGHT_KINDS = ("stanley-omega", "even-even", "big-schur", "macdonald")


class DeskScaleError(ValueError):
    """Request beyond the sizes this library is built to handle."""


class NotInSpanError(ValueError):
    """A polynomial that is not symmetric in the requested variables."""

    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


def _desk(degree: int | None = None, m: int | None = None):
    if degree is not None and degree > DESK_MAX_DEGREE:
        raise DeskScaleError(f"desk-scale limit: degree {degree} > {DESK_MAX_DEGREE}")
    if m is not None and m > DESK_MAX_VARS:
        raise DeskScaleError(f"desk-scale limit: {m} variables > {DESK_MAX_VARS}")


def vandermonde(X: Sequence) -> object:
    """prod_{i<j} (x_i - x_j)."""
    out = 1
    for i in range(len(X)):
        for j in range(i + 1, len(X)):
            out = out * (X[i] - X[j])
    return out


# Schur functions and one-row families


@lru_cache(maxsize=None)
def schur(lam: Partition, m: int) -> Poly:
    """s_lam(x1..xm) as the bialternant det(x_i^{l_j}) / Vandermonde."""
    lam = Partition(tuple(lam))
    if lam.length > m:
        raise ValueError(f"schur needs length(lam) <= m, got {lam.length} > {m}")
    _desk(m=m)
    if m == 0:
        return Poly.const(1)
    X = xvars(m)
    ell = staircase_shift(lam, m)
    alt = determinant(Matrix([[x ** e for e in ell] for x in X]), method="cofactor")
    # divide by one linear factor at a time
    for i in range(m):
        for j in range(i + 1, m):
            alt = alt.exact_divide(X[i] - X[j])
    return alt


@lru_cache(maxsize=None)
def power_sum(r: int, m: int) -> Poly:
    if r < 1 or m < 1:
        raise ValueError("power_sum needs r >= 1 and m >= 1")
    out = Poly()
    for x in xvars(m):
        out = out + x ** r
    return out


@lru_cache(maxsize=None)
def complete_homogeneous(r: int, m: int) -> Poly:
    if r < 0:
        return Poly()
    if r == 0:
        return Poly.const(1)
    # h_r(x1..xm) = h_r(x1..x_{m-1}) + x_m h_{r-1}(x1..xm)
    if m == 0:
        return Poly()
    return complete_homogeneous(r, m - 1) + var(f"x{m}") * complete_homogeneous(r - 1, m)


@lru_cache(maxsize=None)
def elementary(r: int, m: int) -> Poly:
    if r < 0 or r > m:
        return Poly()
    if r == 0:
        return Poly.const(1)
    return elementary(r, m - 1) + var(f"x{m}") * elementary(r - 1, m - 1)


@lru_cache(maxsize=None)
def power_product(mu: Partition, m: int) -> Poly:
    out = Poly.const(1)
    for part in mu.parts:
        out = out * power_sum(part, m)
    return out


def row_determinant_schur(lam: Partition, generators: Callable[[int], object]):
    """det(g_{lam_i - i + j}) over a one-row family, with g_k = 0 for k < 0."""
    lam = Partition(tuple(lam))
    ell = lam.length
    if ell == 0:
        return Poly.const(1)

    def g(k):
        return Poly() if k < 0 else generators(k)

    M = Matrix([[g(lam[i] - i + j) for j in range(ell)] for i in range(ell)])
    return determinant(M)


def schur_jacobi_trudi(lam: Partition, m: int) -> Poly:
    return row_determinant_schur(lam, lambda k: complete_homogeneous(k, m))


@lru_cache(maxsize=None)
def hl_q_generator(r: int, m: int, cap: SeriesCap | None = None) -> Poly:
    """Coefficient of y^r in prod_i (1 - t x_i y) / (1 - x_i y).

    The product's two factors expand to sum_k e_k (-t)^k y^k and sum_k h_k y^k.
    """
    if r < 0:
        return Poly()
    if cap is not None and r > cap.max_total_degree:
        raise ValueError("generator index exceeds the series cap")
    t = var("t")
    out = Poly()
    for k in range(0, min(r, m) + 1):
        out = out + complete_homogeneous(r - k, m) * elementary(k, m) * (-t) ** k
    return out


def _q_geometric(k: int, q_order: int) -> Poly:
    """1 / (1 - q^k) truncated to q-degree q_order."""
    q = var("q")
    out = Poly()
    for j in range(0, q_order // k + 1):
        out = out + q ** (j * k)
    return out


@lru_cache(maxsize=None)
def macdonald_g_generator(r: int, m: int, q_order: int) -> Poly:
    """Coefficient of y^r in exp(sum_k (1-t^k)/(1-q^k) p_k y^k / k).

    Uses r g_r = sum_{k=1}^r c_k p_k g_{r-k} with c_k = (1-t^k)/(1-q^k)
    expanded through q^q_order.
    """
    if r < 0:
        return Poly()
    if r == 0:
        return Poly.const(1)
    t = var("t")
    acc = Poly()
    for k in range(1, r + 1):
        ck = (1 - t ** k) * _q_geometric(k, q_order)
        acc = acc + (ck * power_sum(k, m) * macdonald_g_generator(r - k, m, q_order)).truncate_var("q", q_order)
    return acc / r


def big_schur(lam: Partition, m: int) -> Poly:
    return row_determinant_schur(lam, lambda k: hl_q_generator(k, m))


def macdonald_T(lam: Partition, m: int, q_order: int) -> Poly:
    return row_determinant_schur(lam, lambda k: macdonald_g_generator(k, m, q_order)).truncate_var("q", q_order)


# weighted sums


@dataclass(frozen=True)
class TruncatedSum:
    value: Poly
    num_vars: int
    cap: SeriesCap
    weight_kind: str
    q_order: int | None = None


def _weight(kind: str, lam: Partition):
    if kind == "even-even":
        return 1 if lam.is_even() and conjugate(lam).is_even() else 0
    return omega_weight(lam)


def weighted_sum(kind: str, m: int, cap: SeriesCap | int, q_order: int | None = None) -> TruncatedSum:
    """sum over |lam| <= cap, length(lam) <= m, of weight(lam) * basis(lam)."""
    if isinstance(cap, int):
        cap = SeriesCap(cap)
    if kind not in WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind {kind!r}")
    if m < 1:
        raise ValueError("weighted_sum needs m >= 1")
    _desk(cap.max_total_degree, m)
    if kind == "macdonald" and q_order is None:
        raise ValueError("macdonald sums need q_order")
    total = Poly()
    for lam in enumerate_partitions(cap.max_total_degree, m):
        w = _weight(kind, lam)
        if not w:
            continue
        if kind in ("stanley-omega", "even-even"):
            basis = schur(lam, m)
        elif kind == "big-schur":
            basis = big_schur(lam, m)
        else:
            basis = macdonald_T(lam, m, q_order)
        total = total + basis * w
    return TruncatedSum(total, m, cap, kind, q_order)


# V^n, a_{alpha,beta}, U^n, f_n


def _check_lengths(n: int, *lists):
    for L in lists:
        if len(L) != 2 * n:
            raise ValueError(f"expected tuples of length {2 * n}, got {len(L)}")


def vn_matrix(X, Y, A, B, n: int) -> Matrix:
    _check_lengths(n, X, Y, A, B)

    def entry(i, j):
        # j is 1-based
        if j <= n:
            return A[i] * _pow(X[i], n - j) * _pow(Y[i], j - 1)
        return B[i] * _pow(X[i], 2 * n - j) * _pow(Y[i], j - n - 1)

    return Matrix([[entry(i, j) for j in range(1, 2 * n + 1)] for i in range(2 * n)])


def _pow(x, e: int):
    if e == 0:
        return 1
    return x ** e


def build_Vn(X, Y, A, B, n: int, method: str | None = None):
    """det of the 2n x 2n matrix [a_i x_i^{n-j} y_i^{j-1} | b_i x_i^{2n-j} y_i^{j-n-1}]."""
    if n == 0:
        return 1
    return determinant(vn_matrix(X, Y, A, B, n), method=method)


def a_alpha_beta(alpha: Sequence[int], beta: Sequence[int], X, A, method: str | None = None):
    """det [a_i x_i^{alpha_k} | x_i^{beta_k}] for compositions of length n."""
    n = len(alpha)
    if len(beta) != n:
        raise ValueError("alpha and beta must have the same length")
    _check_lengths(n, X, A)
    rows = [[A[i] * _pow(X[i], e) for e in alpha] + [_pow(X[i], e) for e in beta] for i in range(2 * n)]
    return determinant(Matrix(rows), method=method)


def build_Un(X, A, n: int, method: str | None = None):
    """Sum over lam, mu in P_n of a_{lam + delta_n, mu + delta_n}(X; A)."""
    _check_lengths(n, X, A)
    if n == 0:
        return 1
    shifts = [staircase_shift(lam, n) for lam in enumerate_Pn(n)]
    total = 0
    for al in shifts:
        for be in shifts:
            total = total + a_alpha_beta(al, be, X, A, method=method)
    return total


def fn_tuples(X: Sequence):
    """The four tuples (X^2, 1 + abcd X^4, X + a X^2, 1 - a(b+c) X^2 - abc X^3)."""
    a, b, c, d = (var(s) for s in "abcd")
    abcd = a * b * c * d
    Xs = [Poly.lift(x) for x in X]
    return (
        [x * x for x in Xs],
        [1 + abcd * x ** 4 for x in Xs],
        [x + a * x * x for x in Xs],
        [1 - a * (b + c) * x * x - a * b * c * x ** 3 for x in Xs],
    )


def build_fn(X: Sequence, n: int, method: str | None = None):
    _check_lengths(n, X)
    return build_Vn(*fn_tuples(X), n, method=method)


def pfaffian_entry(i: int, j: int, X: Sequence | None = None) -> RatFun:
    """The entry p_ij of the Pfaffian expressing the weighted Schur sum."""
    a, b, c, d = (var(s) for s in "abcd")
    if X is None:
        xi, xj = var(f"x{i}"), var(f"x{j}")
    else:
        xi, xj = Poly.lift(X[i]), Poly.lift(X[j])
    num = pfaffian_entry_numerator(xi, xj)
    den = (1 - a * b * xi ** 2) * (1 - a * b * xj ** 2) * (1 - a * b * c * d * xi ** 2 * xj ** 2)
    return RatFun(num, den)


def pfaffian_entry_numerator(xi, xj) -> Poly:
    a, b, c, d = (var(s) for s in "abcd")
    u = lambda x: x + a * x ** 2
    v = lambda x: 1 - a * (b + c) * x ** 2 - a * b * c * x ** 3
    return u(xi) * v(xj) - u(xj) * v(xi)


# power-sum basis


@dataclass
class PBasisExpansion:
    """Finite sum of coefficient * p_mu, keyed by the partition mu."""

    coefficients: dict = field(default_factory=dict)
    degree: int = 0

    def coefficient(self, mu) -> object:
        mu = mu if isinstance(mu, Partition) else Partition(tuple(mu))
        return self.coefficients.get(mu, 0)

    def items(self):
        return sorted(self.coefficients.items(), key=lambda kv: (kv[0].size, tuple(-p for p in kv[0].parts)))

    def even_part_terms(self) -> list:
        return [(mu, c) for mu, c in self.items() if any(p % 2 == 0 for p in mu.parts) and not _zero(c)]

    def __sub__(self, other: "PBasisExpansion") -> "PBasisExpansion":
        out = dict(self.coefficients)
        for mu, c in other.coefficients.items():
            out[mu] = out.get(mu, 0) - c
        return PBasisExpansion({k: v for k, v in out.items() if not _zero(v)}, max(self.degree, other.degree))

    def to_poly(self, m: int) -> Poly:
        out = Poly()
        for mu, c in self.coefficients.items():
            if isinstance(c, RatFun):
                raise TypeError("rational-function coefficients have no polynomial image")
            out = out + power_product(mu, m) * c
        return out

    def __str__(self):
        parts = []
        for mu, c in self.items():
            label = "p[" + ",".join(map(str, mu.parts)) + "]" if mu.parts else "1"
            parts.append(f"({c}) {label}")
        return " + ".join(parts) if parts else "0"


def _zero(c) -> bool:
    if isinstance(c, (Poly, RatFun)):
        return c.is_zero()
    return c == 0


@lru_cache(maxsize=None)
def _p_transition_inverse(d: int, m: int):
    """Inverse of the matrix [coeff of x^alpha in p_mu] over partitions of d."""
    parts = partitions_of(d)
    X = [f"x{i}" for i in range(1, m + 1)]
    cols = []
    for mu in parts:
        split = power_product(mu, m).split(X)
        cols.append([split.get(alpha.padded(m), Poly()).constant_term() for alpha in parts])
    size = len(parts)
    # rows alpha, columns mu
    M = [[mpq(cols[j][i]) for j in range(size)] for i in range(size)]
    inv = [[mpq(1 if i == j else 0) for j in range(size)] for i in range(size)]
    for col in range(size):
        piv = next(r for r in range(col, size) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        s = 1 / M[col][col]
        M[col] = [v * s for v in M[col]]
        inv[col] = [v * s for v in inv[col]]
        for r in range(size):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [u - f * v for u, v in zip(M[r], M[col])]
                inv[r] = [u - f * v for u, v in zip(inv[r], inv[col])]
    return parts, inv


def p_basis_decompose(f: Poly, degree: int, m: int) -> PBasisExpansion:
    """Coefficients c_mu with sum c_mu p_mu(x1..xm) = f through the given degree.

    Raises NotInSpanError (with a witness monomial) when f is not symmetric.
    """
    if m < degree:
        raise ValueError(f"need m >= degree for an independent power-sum basis ({m} < {degree})")
    _desk(degree, m)
    f = Poly.lift(f)
    X = [f"x{i}" for i in range(1, m + 1)]
    comps = f.homogeneous_components(SeriesCap(degree))
    coeffs: dict = {}
    for d in range(degree + 1):
        fd = comps[d]
        if fd.is_zero():
            continue
        split = fd.split(X)
        parts, inv = _p_transition_inverse(d, m)
        rhs = [split.get(alpha.padded(m), Poly()) for alpha in parts]
        rebuilt = Poly()
        for k, mu in enumerate(parts):
            c = Poly()
            for j, r in enumerate(rhs):
                if inv[k][j] and r:
                    c = c + r * inv[k][j]
            if c:
                coeffs[mu] = c
                rebuilt = rebuilt + power_product(mu, m) * c
        diff = fd - rebuilt
        if diff:
            exps, coef = next(iter(diff.terms()))
            raise NotInSpanError(
                f"degree-{d} component is not symmetric in x1..x{m}",
                {"monomial": exps, "coefficient": str(coef)},
            )
    return PBasisExpansion(coeffs, degree)


def p_expansion_from_terms(terms: Mapping, degree: int) -> PBasisExpansion:
    return PBasisExpansion({Partition(tuple(k)): v for k, v in terms.items() if not _zero(v)}, degree)


# oddness criterion


def oddness_defect(f: Poly, m: int, cap: SeriesCap, var_name: str = "t") -> Poly:
    """f(x1..x_{m-2}, t, -t) - f(x1..x_{m-2}, 0, 0), truncated with t graded."""
    if m < 2:
        raise ValueError("the oddness test needs at least two variables")
    t = var(var_name)
    graded = cap.with_graded(var_name)
    a, b = f"x{m - 1}", f"x{m}"
    lhs = Poly.lift(f).substitute({a: t, b: -t}).truncate(graded)
    rhs = Poly.lift(f).substitute({a: 0, b: 0}).truncate(graded)
    return lhs - rhs


def oddness_test(f: Poly, m: int, cap: SeriesCap, var_name: str = "t") -> bool:
    return oddness_defect(f, m, cap, var_name).is_zero()


# theta transforms


def theta_factor(k: int, kind: str):
    t, q = var("t"), var("q")
    if kind == "big-schur":
        return 1 - t ** k
    if kind == "macdonald":
        return RatFun(1 - t ** k, 1 - q ** k)
    raise ValueError(f"unknown theta kind {kind!r}")


def theta_transform(e: PBasisExpansion, kind: str) -> PBasisExpansion:
    """Apply p_k -> (1-t^k) p_k (big-schur) or (1-t^k)/(1-q^k) p_k (macdonald)."""
    out = {}
    for mu, c in e.coefficients.items():
        factor = 1
        for part in mu.parts:
            factor = factor * theta_factor(part, kind)
        if kind == "macdonald":
            out[mu] = RatFun.lift(c) * RatFun.lift(factor)
        else:
            out[mu] = c * factor
    return PBasisExpansion(out, e.degree)


# correction series


def correction_expansion(degree: int, kind: str = "stanley-omega") -> PBasisExpansion:
    """The two explicit even-power-sum series, through the given degree.

    kind ``stanley-omega``: sum a^k(b^k-c^k)/(2k) p_{2k} + sum (abcd)^k/(4k) p_{2k}^2;
    ``even-even``: sum p_{2k}^2/(4k); ``big-schur``/``macdonald``: the first form
    with each p_j scaled by its theta factor.
    """
    a, b, c, d = (var(s) for s in "abcd")
    out: dict = {}
    for k in range(1, degree // 2 + 1):
        if kind != "even-even":
            out[Partition((2 * k,))] = (a ** k * (b ** k - c ** k)) / (2 * k)
        if 4 * k <= degree:
            w = (a * b * c * d) ** k if kind != "even-even" else Poly.const(1)
            out[Partition((2 * k, 2 * k))] = w / (4 * k)
    base = PBasisExpansion(out, degree)
    if kind in ("big-schur", "macdonald"):
        return theta_transform(base, kind)
    return base


def correction_poly(degree: int, m: int, kind: str = "stanley-omega") -> Poly:
    return correction_expansion(degree, kind).to_poly(m)


def binom2(n: int) -> int:
    return comb(n, 2)

from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from pfaffsym.ring import (
    NotDivisibleError,
    Poly,
    RatFun,
    SeriesCap,
    SeriesError,
    UnboundVariableError,
    poly_arith,
    poly_evaluate,
    poly_exact_divide,
    poly_substitute,
    ratfun_equals,
    ratfun_series,
    series_exp,
    series_inverse,
    series_log,
    var,
    variables,
    xvars,
)

NAMES = ("x1", "x2", "a", "t")
x1, x2, a, b, c, d, t = variables("x1", "x2", "a", "b", "c", "d", "t")

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
monos = st.tuples(*(st.integers(0, 3) for _ in NAMES))
polys = st.dictionaries(monos, coeffs, max_size=6).map(
    lambda terms: Poly.from_terms((dict(zip(NAMES, e)), c) for e, c in terms.items())
)

SYM = sympy.symbols(NAMES)


def to_sympy(p: Poly):
    out = sympy.Integer(0)
    for exps, coef in p.terms():
        term = sympy.Rational(int(coef.numerator), int(coef.denominator))
        for name, e in exps.items():
            term *= SYM[NAMES.index(name)] ** e
        out += term
    return sympy.expand(out)


@given(polys, polys)
def test_add_mul_match_sympy(p, q):
    assert to_sympy(p + q) == sympy.expand(to_sympy(p) + to_sympy(q))
    assert to_sympy(p * q) == sympy.expand(to_sympy(p) * to_sympy(q))
    assert to_sympy(p - q) == sympy.expand(to_sympy(p) - to_sympy(q))


@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == 0
    assert p * 1 == p


@given(polys, st.integers(0, 3))
def test_pow_is_repeated_product(p, e):
    want = Poly.const(1)
    for _ in range(e):
        want = want * p
    assert p ** e == want


@given(polys, polys)
def test_exact_divide_recovers_factor(p, q):
    if q.is_zero():
        return
    assert (p * q).exact_divide(q) == p


def test_exact_divide_rejects_non_multiple():
    with pytest.raises(NotDivisibleError) as info:
        (x1 ** 2 + 1).exact_divide(x1 - x2)
    assert not info.value.remainder.is_zero()
    with pytest.raises(NotDivisibleError):
        (x1 * x2 + 1).exact_divide(x1)
    with pytest.raises(ZeroDivisionError):
        x1.exact_divide(Poly())


def test_exact_divide_examples():
    assert (x1 ** 2 - x2 ** 2).exact_divide(x1 - x2) == x1 + x2
    assert poly_exact_divide(x1 ** 3 - 1, x1 - 1) == x1 ** 2 + x1 + 1


@given(polys, st.fractions(-3, 3, max_denominator=5), st.fractions(-3, 3, max_denominator=5))
def test_evaluate_is_a_homomorphism(p, u, v):
    point = {"x1": u, "x2": v, "a": Fraction(2, 3), "t": Fraction(-1, 2)}
    q = p * p + p
    pv = p.evaluate(point)
    assert q.evaluate(point) == pv * pv + pv


@given(polys)
def test_substitute_then_evaluate(p):
    sub = p.substitute({"x1": x2 + a, "t": 2 * x1})
    point = {"x1": mpq(1, 3), "x2": mpq(-2), "a": mpq(5, 7), "t": mpq(3)}
    inner = {"x1": point["x2"] + point["a"], "x2": point["x2"], "a": point["a"], "t": 2 * point["x1"]}
    assert sub.evaluate(point) == p.evaluate(inner)


def test_substitution_is_simultaneous():
    p = x1 ** 2 * x2
    assert p.substitute({"x1": x2, "x2": x1}) == x2 ** 2 * x1
    assert poly_substitute(x1 + x2, {"x1": Poly.const(0)}) == x2


def test_evaluate_unbound_variable():
    with pytest.raises(UnboundVariableError):
        (x1 + a).evaluate({"x1": 1})
    assert poly_evaluate(x1 * x2 + 1, {"x1": 2, "x2": mpq(1, 2)}) == 2


def test_poly_arith_ops():
    assert poly_arith(x1 + x2, x1 - x2, "mul") == x1 ** 2 - x2 ** 2
    assert poly_arith(x1, Poly(), "add") == x1
    assert poly_arith(1 + a * x1, 1 + a * x1, "mul") == 1 + 2 * a * x1 + a ** 2 * x1 ** 2
    assert poly_arith(x1, x2, "sub") == x1 - x2
    with pytest.raises(ValueError):
        poly_arith(x1, x2, "div")


def test_display():
    assert str(x1 ** 2 - x2 ** 2) == "x1^2 - x2^2"
    assert str((1 + x1 * a) ** 2) == "1 + 2 x1 a + x1^2 a^2"
    assert str(Poly.const(mpq(-3, 4)) * b) == "-3/4 b"
    assert str(Poly()) == "0"
    assert str(Poly.const(1)) == "1"
    assert str(d * c * b * a) == "a b c d"


def test_x_degree_is_tracked():
    p = x1 ** 3 * x2 * a ** 5 + x2
    assert p.degree() == 9
    assert p.graded_degree() == 4
    assert p.degree("a") == 5
    assert p.truncate(SeriesCap(3)) == x2
    cap = SeriesCap(5).with_graded("a")
    assert p.truncate(cap) == x2


def test_homogeneous_components_and_split():
    p = 1 + x1 * a + x1 * x2 + x2 ** 3
    comps = p.homogeneous_components(SeriesCap(3))
    assert comps == [1, x1 * a, x1 * x2, x2 ** 3]
    parts = (x1 ** 2 * a + x1 ** 2 * b + x2).split(["x1", "x2"])
    assert parts == {(2, 0): a + b, (0, 1): Poly.const(1)}


def test_truncate_var():
    q = var("q")
    assert (1 + q + q ** 2 + q ** 3 * x1).truncate_var("q", 2) == 1 + q + q ** 2


# series, checked against the defining sums

CAP = SeriesCap(6)


def mercator(u, cap):
    out, power = Poly(), Poly.const(1)
    for k in range(1, cap.max_total_degree + 1):
        power = (power * u).truncate(cap)
        out = out + power / k
    return out


def geometric(u, cap):
    out, power = Poly.const(1), Poly.const(1)
    for _ in range(cap.max_total_degree):
        power = (power * u).truncate(cap)
        out = out + power
    return out


def test_series_inverse_of_geometric():
    u = a * x1 + x1 * x2 + b * x2 ** 2
    inv = series_inverse(1 - u, CAP)
    assert inv == geometric(u, CAP)
    assert ((1 - u) * inv).truncate(CAP) == 1


def test_series_log_matches_mercator():
    u = a * x1 + b * x2 ** 2 - x1 * x2
    assert series_log(1 - u, CAP) == -mercator(u, CAP)


def test_series_exp_inverts_log():
    f = 1 + a * x1 + x1 * x2 + b * x2 ** 3
    assert series_exp(series_log(f, CAP), CAP) == f.truncate(CAP)
    g = a * x1 - x2 ** 2
    assert series_log(series_exp(g, CAP), CAP) == g


def test_series_with_graded_parameter():
    cap = SeriesCap(4).with_graded("t")
    inv = series_inverse(1 - a * t ** 2 * x1, cap)
    assert inv == 1 + a * t ** 2 * x1


def test_series_rejects_bad_constant_terms():
    with pytest.raises(SeriesError):
        series_inverse(2 + x1, CAP)
    with pytest.raises(SeriesError):
        series_log(x1, CAP)
    with pytest.raises(SeriesError):
        series_exp(1 + x1, CAP)


def test_ratfun_series_matches_sympy():
    f = RatFun(x1 - x2, (1 - a * x1 ** 2) * (1 - a * x2 ** 2))
    got = ratfun_series(f, SeriesCap(5))
    sx1, sx2, sa = SYM[0], SYM[1], SYM[2]
    s = sympy.Symbol("s")
    expr = (s * sx1 - s * sx2) / ((1 - sa * s ** 2 * sx1 ** 2) * (1 - sa * s ** 2 * sx2 ** 2))
    want = sympy.series(expr, s, 0, 6).removeO().subs(s, 1)
    assert to_sympy(got) == sympy.expand(want)


def test_ratfun_arithmetic_and_equality():
    f = RatFun(x1, 1 - x1)
    g = RatFun(x2, 1 - x1)
    assert ratfun_equals(f + g, RatFun(x1 + x2, 1 - x1))
    assert f * 2 == RatFun(2 * x1 * x2, x2 - x1 * x2)
    assert (f - f).is_zero()
    assert RatFun(x1 ** 2 - 1, x1 - 1).to_poly() == x1 + 1
    with pytest.raises(ZeroDivisionError):
        RatFun(x1, Poly())
    with pytest.raises(ZeroDivisionError):
        f.evaluate({"x1": 1})
    assert f.evaluate({"x1": mpq(1, 2)}) == 1


def test_xvars():
    assert xvars(3) == [var("x1"), var("x2"), var("x3")]
    assert xvars(2, start=4) == [var("x4"), var("x5")]

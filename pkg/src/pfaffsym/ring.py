"""Exact arithmetic: rationals, sparse multivariate polynomials, rational
functions and truncated power series.

Monomials are packed into a single Python int.  Every variable owns a 16-bit
field; the lowest field holds the total degree in the x-variables
(``x1``, ``x2``, ...), so multiplying monomials is one integer addition and
the graded degree used for series truncation is ``m & 0xFFFF``.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

Rational = mpq

_WIDTH = 16
_MASK = (1 << _WIDTH) - 1
_TOP = 1 << (_WIDTH - 1)
_MAX_EXP = _TOP - 1

_X_NAME = re.compile(r"x\d+\Z")
_NAME = re.compile(r"([A-Za-z_]+)(\d*)\Z")
_PARAM_RANK = {"a": 1, "b": 2, "c": 3, "d": 4, "t": 5, "q": 6}


class NotDivisibleError(ArithmeticError):
    """Raised by exact division when the divisor does not divide."""

    def __init__(self, message: str, remainder: "Poly"):
        super().__init__(message)
        self.remainder = remainder


class SeriesError(ValueError):
    pass


class UnboundVariableError(KeyError):
    pass


def _name_key(name: str):
    m = _NAME.match(name)
    if m is None:
        return (9, name, 0)
    prefix, digits = m.groups()
    num = int(digits) if digits else -1
    if prefix == "x" and digits:
        return (0, "", num)
    if prefix in _PARAM_RANK and not digits:
        return (_PARAM_RANK[prefix], "", 0)
    return (7, prefix, num)


class _Alphabet:
    """Registry assigning a bit field to every variable name."""

    def __init__(self):
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.graded: list[bool] = []
        self.guard = _TOP

    def slot(self, name: str) -> int:
        i = self.index.get(name)
        if i is None:
            if _NAME.match(name) is None:
                raise ValueError(f"invalid variable name {name!r}")
            i = len(self.names)
            self.names.append(name)
            self.index[name] = i
            self.graded.append(bool(_X_NAME.match(name)))
            self.guard |= _TOP << ((i + 1) * _WIDTH)
        return i

    def shift(self, name: str) -> int:
        return (self.slot(name) + 1) * _WIDTH

    def pack(self, exps: Mapping[str, int]) -> int:
        m = 0
        for name, e in exps.items():
            if e < 0 or e > _MAX_EXP:
                raise ValueError(f"exponent {e} out of range for {name}")
            if e == 0:
                continue
            i = self.slot(name)
            m += e << ((i + 1) * _WIDTH)
            if self.graded[i]:
                m += e
        return m

    def unpack(self, m: int) -> dict[str, int]:
        out = {}
        m >>= _WIDTH
        i = 0
        while m:
            e = m & _MASK
            if e:
                out[self.names[i]] = e
            m >>= _WIDTH
            i += 1
        return out


ALPHABET = _Alphabet()
for _n in [f"x{i}" for i in range(1, 17)] + list("abcdtq"):
    ALPHABET.slot(_n)


def _coerce(c):
    if isinstance(c, int):
        return c
    if isinstance(c, (Fraction, type(mpq()))):
        return mpq(c)
    raise TypeError(f"cannot use {type(c).__name__} as a coefficient")


def _fmt_coeff(c) -> str:
    return str(c)


@dataclass(frozen=True)
class SeriesCap:
    """Truncation degree for power series.

    ``graded_vars`` of ``None`` grades by the x-variables only; otherwise it is
    a set of names, where ``"x*"`` stands for all x-variables.
    """

    max_total_degree: int
    graded_vars: frozenset | None = None

    def __post_init__(self):
        if self.max_total_degree < 0:
            raise ValueError("max_total_degree must be nonnegative")
        if self.graded_vars is not None and not isinstance(self.graded_vars, frozenset):
            object.__setattr__(self, "graded_vars", frozenset(self.graded_vars))

    def with_graded(self, *names: str) -> "SeriesCap":
        base = {"x*"} if self.graded_vars is None else set(self.graded_vars)
        return SeriesCap(self.max_total_degree, frozenset(base | set(names)))

    def degree_fn(self):
        if self.graded_vars is None:
            return _x_degree
        use_x = "x*" in self.graded_vars
        shifts = [ALPHABET.shift(v) for v in sorted(self.graded_vars) if v != "x*"]
        if any(_X_NAME.match(v) for v in self.graded_vars):
            raise ValueError("name x-variables through 'x*', not individually")

        def deg(m: int) -> int:
            d = m & _MASK if use_x else 0
            for s in shifts:
                d += (m >> s) & _MASK
            return d

        return deg


def _x_degree(m: int) -> int:
    return m & _MASK


class Poly:
    """Sparse polynomial with exact rational coefficients.

    Treated as immutable: every operation returns a new instance.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None, _trusted=False):
        if terms is None:
            self._t = {}
        elif _trusted:
            self._t = terms
        else:
            self._t = {m: _coerce(c) for m, c in terms.items() if c}
        self._hash = None

    # construction

    @classmethod
    def const(cls, c) -> "Poly":
        c = _coerce(c)
        return cls({0: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({ALPHABET.pack({name: 1}): 1}, _trusted=True)

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff=1) -> "Poly":
        return cls({ALPHABET.pack(exps): coeff})

    @classmethod
    def from_terms(cls, items: Iterable[tuple[Mapping[str, int], object]]) -> "Poly":
        acc: dict[int, object] = {}
        for exps, c in items:
            m = ALPHABET.pack(exps)
            acc[m] = acc.get(m, 0) + _coerce(c)
        return cls({m: c for m, c in acc.items() if c}, _trusted=True)

    @staticmethod
    def lift(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    # inspection

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def terms(self):
        """Yield ``(exponent dict, coefficient)`` pairs in canonical order."""
        for m in self._sorted_monomials():
            yield ALPHABET.unpack(m), self._t[m]

    def raw_terms(self):
        return self._t.items()

    def _sorted_monomials(self):
        return sorted(self._t, key=_display_key)

    def coefficient(self, exps: Mapping[str, int]):
        return self._t.get(ALPHABET.pack(exps), 0)

    def constant_term(self):
        return self._t.get(0, 0)

    def variables(self) -> list[str]:
        acc = 0
        for m in self._t:
            acc |= m
        out = []
        acc >>= _WIDTH
        i = 0
        while acc:
            if acc & _MASK:
                out.append(ALPHABET.names[i])
            acc >>= _WIDTH
            i += 1
        return sorted(out, key=_name_key)

    def degree(self, var: str | None = None) -> int:
        """Total degree, or the degree in a single variable."""
        if not self._t:
            return -1
        if var is None:
            return max(sum(ALPHABET.unpack(m).values()) for m in self._t)
        s = ALPHABET.shift(var)
        return max((m >> s) & _MASK for m in self._t)

    def graded_degree(self, cap: SeriesCap | None = None) -> int:
        if not self._t:
            return -1
        deg = _x_degree if cap is None else cap.degree_fn()
        return max(deg(m) for m in self._t)

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, RatFun):
                return NotImplemented
            other = Poly.const(other)
        if len(self._t) < len(other._t):
            small, big = self._t, other._t
        else:
            small, big = other._t, self._t
        out = dict(big)
        for m, c in small.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self._t.items()}, _trusted=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, RatFun):
                return NotImplemented
            other = Poly.const(other)
        out = dict(self._t)
        for m, c in other._t.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                v -= c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly(out, _trusted=True)

    def __rsub__(self, other):
        return Poly.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, RatFun):
                return NotImplemented
            c = _coerce(other)
            if not c:
                return Poly()
            return Poly({m: v * c for m, v in self._t.items()}, _trusted=True)
        return _mul(self._t, other._t, None, None)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Poly, RatFun)):
            return RatFun(self, 1) / other
        c = _coerce(other)
        if not c:
            raise ZeroDivisionError("division of polynomial by zero")
        inv = 1 / mpq(c)
        return Poly({m: v * inv for m, v in self._t.items()}, _trusted=True)

    def __rtruediv__(self, other):
        return RatFun(Poly.lift(other), self)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def mul_trunc(self, other: "Poly", cap: SeriesCap) -> "Poly":
        """Product with terms of graded degree above the cap dropped."""
        other = Poly.lift(other)
        return _mul(self._t, other._t, cap.max_total_degree, cap.degree_fn())

    def pow_trunc(self, e: int, cap: SeriesCap) -> "Poly":
        result = Poly.const(1).truncate(cap)
        for _ in range(e):
            result = result.mul_trunc(self, cap)
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._t == other._t
        if isinstance(other, RatFun):
            return other == self
        try:
            c = _coerce(other)
        except TypeError:
            return NotImplemented
        return self._t == ({0: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # truncation and grading

    def truncate(self, cap: SeriesCap) -> "Poly":
        deg = cap.degree_fn()
        top = cap.max_total_degree
        return Poly({m: c for m, c in self._t.items() if deg(m) <= top}, _trusted=True)

    def homogeneous_components(self, cap: SeriesCap) -> list["Poly"]:
        """Components of graded degree 0..cap (terms beyond the cap dropped)."""
        deg = cap.degree_fn()
        parts: list[dict] = [{} for _ in range(cap.max_total_degree + 1)]
        for m, c in self._t.items():
            d = deg(m)
            if d <= cap.max_total_degree:
                parts[d][m] = c
        return [Poly(p, _trusted=True) for p in parts]

    def truncate_var(self, var: str, order: int) -> "Poly":
        """Drop terms whose degree in ``var`` exceeds ``order``."""
        s = ALPHABET.shift(var)
        return Poly({m: c for m, c in self._t.items() if (m >> s) & _MASK <= order}, _trusted=True)

    def split(self, graded: Iterable[str]) -> dict[tuple, "Poly"]:
        """Group terms by their exponents in ``graded``.

        Returns a map from the exponent tuple (ordered as ``graded``) to the
        cofactor polynomial in the remaining variables.
        """
        graded = list(graded)
        shifts = [ALPHABET.shift(v) for v in graded]
        mask = 0
        xsub = 0
        for v, s in zip(graded, shifts):
            mask |= _MASK << s
        out: dict[tuple, dict] = {}
        xflags = [ALPHABET.graded[s // _WIDTH - 1] for s in shifts]
        for m, c in self._t.items():
            key = tuple((m >> s) & _MASK for s in shifts)
            xsub = sum(e for e, g in zip(key, xflags) if g)
            rest = (m & ~mask) - xsub
            out.setdefault(key, {})[rest] = c
        return {k: Poly(v, _trusted=True) for k, v in out.items()}

    # substitution and evaluation

    def substitute(self, bindings: Mapping[str, object]) -> "Poly":
        """Simultaneous substitution of polynomials for variables."""
        names = list(bindings)
        shifts = [ALPHABET.shift(v) for v in names]
        values = [Poly.lift(bindings[v]) for v in names]
        mask = 0
        for s in shifts:
            mask |= _MASK << s
        xflags = [ALPHABET.graded[s // _WIDTH - 1] for s in shifts]
        powers: list[dict[int, Poly]] = [{0: Poly.const(1), 1: v} for v in values]

        def power(i: int, e: int) -> Poly:
            cache = powers[i]
            p = cache.get(e)
            if p is None:
                p = power(i, e // 2)
                p = p * p
                if e % 2:
                    p = p * values[i]
                cache[e] = p
            return p

        images: dict[tuple, Poly] = {}
        groups: dict[tuple, dict] = {}
        for m, c in self._t.items():
            key = tuple((m >> s) & _MASK for s in shifts)
            xsub = sum(e for e, g in zip(key, xflags) if g)
            rest = (m & ~mask) - xsub
            groups.setdefault(key, {})[rest] = c
        acc = Poly()
        for key, rest in groups.items():
            img = images.get(key)
            if img is None:
                img = Poly.const(1)
                for i, e in enumerate(key):
                    if e:
                        img = img * power(i, e)
                images[key] = img
            acc = acc + img * Poly(rest, _trusted=True)
        return acc

    def evaluate(self, point: Mapping[str, object]):
        """Exact value at a point binding every variable."""
        total = 0
        cache: dict[tuple[str, int], object] = {}
        for m, c in self._t.items():
            val = c
            for name, e in ALPHABET.unpack(m).items():
                if name not in point:
                    raise UnboundVariableError(name)
                key = (name, e)
                pw = cache.get(key)
                if pw is None:
                    pw = cache[key] = _coerce(point[name]) ** e
                val = val * pw
            total = total + val
        return mpq(total)

    def partial_evaluate(self, point: Mapping[str, object]) -> "Poly":
        return self.substitute({k: Poly.const(v) for k, v in point.items()})

    # division

    def exact_divide(self, den: "Poly") -> "Poly":
        """Quotient ``q`` with ``q * den == self``; raises NotDivisibleError."""
        den = Poly.lift(den)
        if not den._t:
            raise ZeroDivisionError("division by the zero polynomial")
        dt = den._t
        if len(dt) == 1:
            (md, cd), = dt.items()
            inv = 1 / mpq(cd)
            out = {}
            guard = ALPHABET.guard
            for m, c in self._t.items():
                if ((m | guard) - md) & guard != guard:
                    raise NotDivisibleError("not divisible", self)
                out[m - md] = c * inv
            return Poly(out, _trusted=True)
        lt_d = max(dt)
        lc_inv = 1 / mpq(dt[lt_d])
        rest_d = [(m - lt_d, c) for m, c in dt.items() if m != lt_d]
        rem = dict(self._t)
        heap = [-m for m in rem]
        heapq.heapify(heap)
        quo = {}
        guard = ALPHABET.guard
        while rem:
            lt = -heapq.heappop(heap)
            c = rem.get(lt)
            if c is None:
                continue
            if ((lt | guard) - lt_d) & guard != guard:
                raise NotDivisibleError("not divisible", Poly(rem, _trusted=True))
            qm = lt - lt_d
            qc = c * lc_inv
            quo[qm] = qc
            del rem[lt]
            for dm, dc in rest_d:
                # dm may be negative offset; qm + lt_d + dm is a genuine monomial
                k = lt + dm
                v = rem.get(k)
                if v is None:
                    rem[k] = -qc * dc
                    heapq.heappush(heap, -k)
                else:
                    v -= qc * dc
                    if v:
                        rem[k] = v
                    else:
                        del rem[k]
        return Poly(quo, _trusted=True)

    # display

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for i, m in enumerate(self._sorted_monomials()):
            c = self._t[m]
            neg = c < 0
            a = -c if neg else c
            mono = _fmt_monomial(m)
            if mono == "1":
                body = _fmt_coeff(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_coeff(a)} {mono}"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"Poly({self})"


def _fmt_monomial(m: int) -> str:
    exps = ALPHABET.unpack(m)
    if not exps:
        return "1"
    names = sorted(exps, key=_name_key)
    return " ".join(n if exps[n] == 1 else f"{n}^{exps[n]}" for n in names)


def _display_key(m: int):
    exps = ALPHABET.unpack(m)
    return (m & _MASK, sum(exps.values()), [(_name_key(n), -exps[n]) for n in sorted(exps, key=_name_key)])


def _mul(a: dict, b: dict, top: int | None, deg) -> Poly:
    if not a or not b:
        return Poly()
    if len(a) > len(b):
        a, b = b, a
    out: dict[int, object] = {}
    get = out.get
    if top is None:
        items_b = list(b.items())
        for ma, ca in a.items():
            for mb, cb in items_b:
                k = ma + mb
                v = get(k)
                if v is None:
                    out[k] = ca * cb
                else:
                    out[k] = v + ca * cb
    else:
        by_deg_b: dict[int, list] = {}
        for mb, cb in b.items():
            d = deg(mb)
            if d <= top:
                by_deg_b.setdefault(d, []).append((mb, cb))
        degs_b = sorted(by_deg_b)
        for ma, ca in a.items():
            da = deg(ma)
            if da > top:
                continue
            room = top - da
            for db in degs_b:
                if db > room:
                    break
                for mb, cb in by_deg_b[db]:
                    k = ma + mb
                    v = get(k)
                    if v is None:
                        out[k] = ca * cb
                    else:
                        out[k] = v + ca * cb
    return Poly({k: v for k, v in out.items() if v}, _trusted=True)


def var(name: str) -> Poly:
    return Poly.var(name)


def variables(*names: str) -> list[Poly]:
    return [Poly.var(n) for n in names]


def xvars(m: int, start: int = 1) -> list[Poly]:
    """The x-variables ``x_start, ..., x_{start+m-1}``."""
    return [Poly.var(f"x{i}") for i in range(start, start + m)]


class RatFun:
    """Quotient of two polynomials; no gcd normalization."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        self.num = Poly.lift(num)
        self.den = Poly.lift(den)
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")

    @staticmethod
    def lift(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        return RatFun(x, 1)

    def __add__(self, other):
        o = RatFun.lift(other)
        if self.den == o.den:
            return RatFun(self.num + o.num, self.den)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFun.lift(other))

    def __rsub__(self, other):
        return RatFun.lift(other) - self

    def __mul__(self, other):
        o = RatFun.lift(other)
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatFun.lift(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RatFun.lift(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return RatFun(self.den ** (-e), self.num ** (-e))
        return RatFun(self.num ** e, self.den ** e)

    def __eq__(self, other):
        if isinstance(other, (RatFun, Poly, int, Fraction, type(mpq()))):
            return ratfun_equals(self, RatFun.lift(other))
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at point")
        return self.num.evaluate(point) / d

    def substitute(self, bindings) -> "RatFun":
        return RatFun(self.num.substitute(bindings), self.den.substitute(bindings))

    def series(self, cap: SeriesCap) -> Poly:
        return ratfun_series(self, cap)

    def to_poly(self) -> Poly:
        """Exact quotient when the denominator divides the numerator."""
        return self.num.exact_divide(self.den)

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __repr__(self):
        return f"RatFun({self})"


# Module-level operations


def poly_arith(lhs: Poly, rhs: Poly, op: str) -> Poly:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown op {op!r}")


def poly_substitute(p: Poly, bindings: Mapping[str, object]) -> Poly:
    return Poly.lift(p).substitute(bindings)


def poly_evaluate(p: Poly, point: Mapping[str, object]):
    return Poly.lift(p).evaluate(point)


def poly_exact_divide(num: Poly, den: Poly) -> Poly:
    return Poly.lift(num).exact_divide(den)


def _unit_check(p: Poly, cap: SeriesCap) -> list[Poly]:
    comps = p.homogeneous_components(cap)
    if comps[0] != 1:
        raise SeriesError(f"constant term must be 1, got {comps[0]}")
    return comps


def series_inverse(p: Poly, cap: SeriesCap) -> Poly:
    """Inverse of ``p`` modulo terms of graded degree above the cap."""
    p = Poly.lift(p)
    comps = _unit_check(p, cap)
    deg = cap.degree_fn()
    inv = [Poly.const(1)]
    for d in range(1, cap.max_total_degree + 1):
        acc = Poly()
        for j in range(1, d + 1):
            if comps[j] and inv[d - j]:
                acc = acc + comps[j] * inv[d - j]
        inv.append(-acc)
    out = Poly()
    for c in inv:
        out = out + c
    assert all(deg(m) <= cap.max_total_degree for m, _ in out.raw_terms())
    return out


def series_log(p: Poly, cap: SeriesCap) -> Poly:
    """Logarithm of a series with constant term 1, truncated at the cap."""
    # Euler-operator recursion: d*l_d = d*p_d - sum_{j<d} j*l_j*p_{d-j}
    p = Poly.lift(p)
    comps = _unit_check(p, cap)
    logs = [Poly()]
    for d in range(1, cap.max_total_degree + 1):
        acc = comps[d] * d
        for j in range(1, d):
            if logs[j] and comps[d - j]:
                acc = acc - (logs[j] * comps[d - j]) * j
        logs.append(acc / d)
    out = Poly()
    for c in logs:
        out = out + c
    return out


def series_exp(p: Poly, cap: SeriesCap) -> Poly:
    """Exponential of a series with zero constant term."""
    p = Poly.lift(p)
    comps = p.homogeneous_components(cap)
    if comps[0]:
        raise SeriesError("exp needs a series without constant term")
    exps = [Poly.const(1)]
    for d in range(1, cap.max_total_degree + 1):
        acc = Poly()
        for j in range(1, d + 1):
            if comps[j] and exps[d - j]:
                acc = acc + (comps[j] * exps[d - j]) * j
        exps.append(acc / d)
    out = Poly()
    for c in exps:
        out = out + c
    return out


def ratfun_equals(f: RatFun, g: RatFun) -> bool:
    f, g = RatFun.lift(f), RatFun.lift(g)
    return f.num * g.den == g.num * f.den


def ratfun_series(f: RatFun, cap: SeriesCap) -> Poly:
    f = RatFun.lift(f)
    inv = series_inverse(f.den, cap)
    return f.num.truncate(cap).mul_trunc(inv, cap)


def rational(p, q=1) -> mpq:
    return mpq(p, q)

"""Exact arithmetic in Z[v, v^-1], its fraction field, and quantum combinatorics.

Coefficients are arbitrary-precision integers; ``Fraction`` coefficients are
tolerated so Green-form values can ride on the same type.  The quantum
parameter satisfies q = v^2 under every specialization, and the bar
involution sends v to v^-1.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache


def _norm(c):
    """Collapse integral Fractions to int so equal values hash equally."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


class LaurentPoly:
    """Sparse Laurent polynomial sum_e c_e v^e.

    Invariants: no zero coefficient is stored and exponents are ints, so
    equality and hashing are structural.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                if c:
                    s = d.get(e, 0) + c
                    s = _norm(s)
                    if s:
                        d[int(e)] = s
                    else:
                        d.pop(int(e), None)
        self.terms = d

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(c) -> "LaurentPoly":
        return LaurentPoly({0: c})

    @staticmethod
    def v_power(e: int, c=1) -> "LaurentPoly":
        return LaurentPoly({e: c})

    @staticmethod
    def from_q_poly(coeffs, shift: int = 0) -> "LaurentPoly":
        """Substitute q = v^2 into sum_k coeffs[k] q^k, then multiply by v^shift."""
        return LaurentPoly({2 * k + shift: c for k, c in enumerate(coeffs)})

    # -- ring structure -----------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        d = dict(self.terms)
        for e, c in other.terms.items():
            s = _norm(d.get(e, 0) + c)
            if s:
                d[e] = s
            else:
                d.pop(e, None)
        out = LaurentPoly.__new__(LaurentPoly)
        out.terms = d
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LaurentPoly.__new__(LaurentPoly)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        d = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                s = _norm(d.get(e, 0) + c1 * c2)
                if s:
                    d[e] = s
                else:
                    d.pop(e, None)
        out = LaurentPoly.__new__(LaurentPoly)
        out.terms = d
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a Laurent polynomial")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, e: int):
        return self.terms.get(e, 0)

    def degree(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(self.terms)

    def valuation(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no valuation")
        return min(self.terms)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    def in_vinv_Z(self) -> bool:
        """Membership in v^-1 Z[v^-1], decided exactly."""
        return all(e < 0 and isinstance(c, int) for e, c in self.terms.items())

    def is_bar_invariant(self) -> bool:
        return all(self.terms.get(-e, 0) == c for e, c in self.terms.items())

    # -- involutions and folds ----------------------------------------

    def bar(self) -> "LaurentPoly":
        """The involution v -> v^-1."""
        out = LaurentPoly.__new__(LaurentPoly)
        out.terms = {-e: c for e, c in self.terms.items()}
        return out

    def bar_fold(self) -> "LaurentPoly":
        """The bar-invariant fold phi_0 + sum_{e>0} phi_e (v^e + v^-e)."""
        d = {}
        for e, c in self.terms.items():
            if e >= 0:
                d[e] = _norm(d.get(e, 0) + c)
                if e > 0:
                    d[-e] = _norm(d.get(-e, 0) + c)
        return LaurentPoly({e: c for e, c in d.items() if c})

    def negative_part(self) -> "LaurentPoly":
        return LaurentPoly({e: c for e, c in self.terms.items() if e < 0})

    # -- exact division and evaluation --------------------------------

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Divide exactly; raises if the quotient is not a Laurent polynomial."""
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return ZERO
        num = dict(self.terms)
        dlead = other.degree()
        dc = other.terms[dlead]
        # An exact Laurent quotient cannot reach below this valuation.
        val_bound = self.valuation() - other.valuation()
        quot = {}
        while num:
            e = max(num)
            c = num[e]
            q = _norm(Fraction(c) / Fraction(dc))
            qe = e - dlead
            if qe < val_bound:
                raise ArithmeticError("inexact Laurent division")
            quot[qe] = q
            for e2, c2 in other.terms.items():
                ne = qe + e2
                s = _norm(num.get(ne, 0) - q * c2)
                if s:
                    num[ne] = s
                else:
                    num.pop(ne, None)
        return LaurentPoly(quot)

    def eval_sqrt(self, q: int) -> tuple[Fraction, Fraction]:
        """Evaluate at v = sqrt(q) exactly, returned as (a, b) with value a + b*sqrt(q)."""
        a = Fraction(0)
        b = Fraction(0)
        for e, c in self.terms.items():
            if e % 2 == 0:
                a += Fraction(c) * Fraction(q) ** (e // 2)
            else:
                b += Fraction(c) * Fraction(q) ** ((e - 1) // 2)
        return a, b

    def subs_v_power(self, k: int) -> "LaurentPoly":
        """Substitute v -> v^k."""
        return LaurentPoly({e * k: c for e, c in self.terms.items()})

    # -- presentation ---------------------------------------------------

    def text(self) -> str:
        """Canonical text form, ascending exponents: ``3*v^-2 + 1 + v^5``."""
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if e == 0:
                parts.append(str(c))
                continue
            ve = "v" if e == 1 else f"v^{e}"
            if c == 1:
                parts.append(ve)
            elif c == -1:
                parts.append(f"-{ve}")
            else:
                parts.append(f"{c}*{ve}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        """JSON form: list of [exponent, coefficient-as-decimal-string]."""
        return [[e, str(self.terms[e])] for e in sorted(self.terms)]

    @staticmethod
    def from_json(data) -> "LaurentPoly":
        out = {}
        for e, c in data:
            out[int(e)] = Fraction(c) if "/" in str(c) else int(c)
        return LaurentPoly(out)

    def __repr__(self):
        return f"LaurentPoly({self.text()})"


_TERM_RE = re.compile(r"^\s*([+-]?\d*)\s*\*?\s*(v(?:\^(-?\d+))?)?\s*$")


def parse_laurent(text: str) -> LaurentPoly:
    """Parse the canonical text form (and simple variants of it)."""
    text = text.strip()
    if text == "0":
        return ZERO
    text = text.replace("- ", "+ -").replace("-v", "+ -1*v")
    out = {}
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError(f"cannot parse term {chunk!r}")
        cs, vs, es = m.groups()
        coeff = int(cs) if cs not in ("", "+", "-") else (-1 if cs == "-" else 1)
        if vs is None:
            e = 0
        else:
            e = int(es) if es is not None else 1
        out[e] = out.get(e, 0) + coeff
    return LaurentPoly(out)


def _coerce(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.const(x)
    raise TypeError(f"cannot coerce {type(x)} to LaurentPoly")


ZERO = LaurentPoly()
ONE = LaurentPoly({0: 1})
V = LaurentPoly({1: 1})


# -- quantum combinatorics --------------------------------------------


@lru_cache(maxsize=None)
def qint(n: int) -> LaurentPoly:
    """The balanced quantum integer (v^n - v^-n)/(v - v^-1); qint(0) = 0."""
    if n < 0:
        return -qint(-n)
    return LaurentPoly({n - 1 - 2 * k: 1 for k in range(n)})


@lru_cache(maxsize=None)
def qfact(n: int) -> LaurentPoly:
    """Quantum factorial, with qfact(0) = 1."""
    if n < 0:
        raise ValueError("negative quantum factorial")
    out = ONE
    for k in range(1, n + 1):
        out = out * qint(k)
    return out


@lru_cache(maxsize=None)
def qbinom(m: int, n: int) -> LaurentPoly:
    """Gaussian binomial [m choose n]; the division is exact."""
    if n < 0 or m < 0 or n > m:
        raise ValueError(f"qbinom({m},{n}) undefined")
    out = qfact(m).exact_div(qfact(n) * qfact(m - n))
    if not out.is_integral():
        raise ArithmeticError("Gaussian binomial division was not exact")
    return out


def bar(x):
    """Bar involution on LaurentPoly or RationalFn."""
    return x.bar()


# -- rational functions ------------------------------------------------


class RationalFn:
    """Quotient of Laurent polynomials; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE):
        num = _coerce(num)
        den = _coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        # Cheap canonicalization: clear v-powers so both parts sit in Z[v].
        if not num.is_zero():
            shift = min(num.valuation(), den.valuation())
            if shift:
                num = LaurentPoly({e - shift: c for e, c in num.terms.items()})
                den = LaurentPoly({e - shift: c for e, c in den.terms.items()})
        self.num = num
        self.den = den

    @staticmethod
    def from_q_fractions(num_coeffs, den_coeffs) -> "RationalFn":
        """Build P(q)/Q(q) with q = v^2 substituted."""
        return RationalFn(
            LaurentPoly.from_q_poly(num_coeffs), LaurentPoly.from_q_poly(den_coeffs)
        )

    def __add__(self, other):
        other = _coerce_rf(other)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_coerce_rf(other))

    def __rsub__(self, other):
        return _coerce_rf(other) + (-self)

    def __mul__(self, other):
        other = _coerce_rf(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_rf(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce_rf(other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, LaurentPoly)):
            other = RationalFn(_coerce(other))
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RationalFn is unhashable; compare explicitly")

    def __bool__(self):
        return not self.num.is_zero()

    def bar(self) -> "RationalFn":
        return RationalFn(self.num.bar(), self.den.bar())

    def series_at_infinity(self, order: int) -> "SeriesTail":
        return series_at_infinity(self, order)

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data) -> "RationalFn":
        return RationalFn(LaurentPoly.from_json(data["num"]), LaurentPoly.from_json(data["den"]))

    def __repr__(self):
        return f"RationalFn(({self.num.text()}) / ({self.den.text()}))"


def _coerce_rf(x) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    return RationalFn(_coerce(x))


class SeriesTail:
    """Truncated expansion at v = infinity.

    ``coeffs[k]`` is the coefficient of v^-k for 0 <= k <= order;
    ``has_positive_part`` records whether positive v-powers occur, in which
    case every tail-membership predicate is automatically false.
    """

    __slots__ = ("order", "coeffs", "has_positive_part")

    def __init__(self, order, coeffs, has_positive_part):
        self.order = order
        self.coeffs = [Fraction(c) for c in coeffs]
        self.has_positive_part = has_positive_part

    def in_vinv_Z(self) -> bool:
        """Certificate for membership in v^-1 Z[v^-1] at this depth."""
        return (
            not self.has_positive_part
            and self.coeffs[0] == 0
            and all(c.denominator == 1 for c in self.coeffs)
        )

    def in_delta_plus_tail(self, delta) -> bool:
        """Certificate for membership in delta + v^-1 Q[[v^-1]]."""
        return not self.has_positive_part and self.coeffs[0] == Fraction(delta)

    def __repr__(self):
        return f"SeriesTail(order={self.order}, pos={self.has_positive_part}, {self.coeffs})"


def series_at_infinity(f: RationalFn, order: int) -> SeriesTail:
    """Expand a rational function in powers of v^-1 to the given depth."""
    if f.num.is_zero():
        return SeriesTail(order, [0] * (order + 1), False)
    dn, dd = f.num.degree(), f.den.degree()
    # Rewrite in w = v^-1 with unit constant term in the denominator.
    a = [Fraction(f.num.coeff(dn - k)) for k in range(dn - f.num.valuation() + 1)]
    b = [Fraction(f.den.coeff(dd - k)) for k in range(dd - f.den.valuation() + 1)]
    shift = dd - dn  # f = w^shift * A(w)/B(w)
    depth = order + max(0, -shift) + 1
    c = []
    for k in range(depth):
        s = a[k] if k < len(a) else Fraction(0)
        for j in range(1, min(k, len(b) - 1) + 1):
            s -= b[j] * c[k - j]
        c.append(s / b[0])
    has_pos = any(c[k] != 0 for k in range(min(depth, max(0, -shift))))
    coeffs = []
    for m in range(order + 1):
        k = m - shift
        coeffs.append(c[k] if 0 <= k < depth else Fraction(0))
    return SeriesTail(order, coeffs, has_pos)


def in_vinv_Z(f, order: int) -> bool:
    """Predicate: value lies in v^-1 Z[v^-1] (exact for Laurent, certified for rational)."""
    if isinstance(f, LaurentPoly):
        return f.in_vinv_Z()
    return series_at_infinity(f, order).in_vinv_Z()


def in_delta_plus_tail(f, delta, order: int) -> bool:
    """Predicate: value lies in delta + v^-1 Q[[v^-1]]."""
    if isinstance(f, LaurentPoly):
        f = RationalFn(f)
    return series_at_infinity(f, order).in_delta_plus_tail(delta)

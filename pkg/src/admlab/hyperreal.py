"""Truncated Levi-Civita numbers: exact infinitesimal arithmetic with lexicographic order.

A number is a finite sum ``sum_j c_j * eps^j`` with exact rational
coefficients ``c_j`` and integer exponents ``j`` in ``[-K, K]``, where
``eps`` is a positive infinitesimal.  Ordering is lexicographic in the
exponent: the term with the smallest exponent dominates.  Products and
quotients whose expansion would need exponents above ``K`` are truncated
and marked via a sticky ``inexact`` flag; exponents below ``-K`` cannot
be truncated soundly (they are the dominant ones) and raise instead.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

DEFAULT_TRUNC_DEGREE = 16

__all__ = [
    "DEFAULT_TRUNC_DEGREE",
    "ExponentRangeError",
    "LCNumber",
    "approx_eq",
    "approx_leq",
    "compare",
]


class ExponentRangeError(ArithmeticError):
    """An operation produced an exponent below -K, outside the representable range."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class LCNumber:
    """A truncated Levi-Civita number.  Treat instances as immutable."""

    __slots__ = ("terms", "trunc_degree", "inexact")

    def __init__(self, terms=None, trunc_degree: int = DEFAULT_TRUNC_DEGREE,
                 inexact: bool = False):
        if trunc_degree < 1:
            raise ValueError("truncation degree must be a positive integer")
        clean: dict[int, Fraction] = {}
        for exp, coef in (terms or {}).items():
            coef = _as_fraction(coef)
            if coef == 0:
                continue
            exp = int(exp)
            if exp < -trunc_degree:
                raise ExponentRangeError(
                    f"exponent {exp} below -{trunc_degree}: dominant term cannot be truncated")
            if exp > trunc_degree:
                inexact = True
                continue
            clean[exp] = coef
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "trunc_degree", trunc_degree)
        object.__setattr__(self, "inexact", inexact)

    def __setattr__(self, name, value):
        raise AttributeError("LCNumber is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_real(cls, x, trunc_degree: int = DEFAULT_TRUNC_DEGREE) -> "LCNumber":
        """Embed an exact rational at exponent 0."""
        return cls({0: _as_fraction(x)}, trunc_degree)

    @classmethod
    def eps(cls, k: int = 1, trunc_degree: int = DEFAULT_TRUNC_DEGREE) -> "LCNumber":
        """The infinitesimal eps^k, for 1 <= k <= trunc_degree."""
        if not 1 <= k <= trunc_degree:
            raise ValueError(f"eps exponent must lie in [1, {trunc_degree}], got {k}")
        return cls({k: Fraction(1)}, trunc_degree)

    @classmethod
    def zero(cls, trunc_degree: int = DEFAULT_TRUNC_DEGREE) -> "LCNumber":
        return cls({}, trunc_degree)

    # -- structure -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def leading_exponent(self):
        """Smallest exponent with a nonzero coefficient, or None for zero."""
        return min(self.terms) if self.terms else None

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.terms[min(self.terms)]

    def sign(self) -> int:
        c = self.leading_coefficient()
        return (c > 0) - (c < 0)

    def is_finite(self) -> bool:
        """No term with negative exponent."""
        return all(e >= 0 for e in self.terms)

    def is_infinitesimal(self) -> bool:
        """Finite with standard part zero (zero itself counts)."""
        return all(e >= 1 for e in self.terms)

    def standard_part(self) -> Fraction:
        """Coefficient at exponent 0.  Raises for infinite numbers."""
        if not self.is_finite():
            raise ValueError(f"standard part of infinite number {self}")
        return self.terms.get(0, Fraction(0))

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LCNumber):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return LCNumber({0: _as_fraction(other)}, self.trunc_degree)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return LCNumber(terms, min(self.trunc_degree, o.trunc_degree),
                        self.inexact or o.inexact)

    __radd__ = __add__

    def __neg__(self):
        return LCNumber({e: -c for e, c in self.terms.items()},
                        self.trunc_degree, self.inexact)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        k = min(self.trunc_degree, o.trunc_degree)
        terms: dict[int, Fraction] = {}
        inexact = self.inexact or o.inexact
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = e1 + e2
                if e > k:
                    inexact = True
                    continue
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return LCNumber(terms, k, inexact)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _divide(self, o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _divide(o, self)

    # -- order -----------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return compare(self, o) < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return compare(self, o) <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return compare(self, o) > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return compare(self, o) >= 0

    def __bool__(self):
        return bool(self.terms)

    # -- text ------------------------------------------------------------

    def __str__(self):
        return format_lc(self)

    def __repr__(self):
        flag = ", inexact" if self.inexact else ""
        return f"LCNumber({format_lc(self)!r}{flag})"

    @classmethod
    def parse(cls, text: str, trunc_degree: int = DEFAULT_TRUNC_DEGREE) -> "LCNumber":
        return parse_lc(text, trunc_degree)


def _divide(a: LCNumber, b: LCNumber) -> LCNumber:
    """Long division by ascending exponent, truncated at the shared degree."""
    if b.is_zero():
        raise ZeroDivisionError("division of Levi-Civita number by zero")
    k = min(a.trunc_degree, b.trunc_degree)
    inexact = a.inexact or b.inexact
    lead_b = b.leading_exponent()
    coef_b = b.terms[lead_b]
    rem = dict(a.terms)
    quot: dict[int, Fraction] = {}
    while rem:
        lead_r = min(rem)
        t_exp = lead_r - lead_b
        if t_exp > k:
            inexact = True  # remaining quotient terms fall beyond the truncation degree
            break
        t_coef = rem[lead_r] / coef_b
        quot[t_exp] = t_coef
        for e, c in b.terms.items():
            e2 = t_exp + e
            v = rem.get(e2, Fraction(0)) - t_coef * c
            if v == 0:
                rem.pop(e2, None)
            else:
                rem[e2] = v
    return LCNumber(quot, k, inexact)


def compare(a: LCNumber, b) -> int:
    """Total lexicographic order: -1 if a < b, 0 if equal, 1 if a > b."""
    if not isinstance(b, LCNumber):
        b = LCNumber({0: _as_fraction(b)}, a.trunc_degree)
    d = a - b
    return d.sign()


def approx_leq(a: LCNumber, b) -> bool:
    """a <~ b: a - b is negative, zero, or a positive infinitesimal."""
    if not isinstance(b, LCNumber):
        b = LCNumber({0: _as_fraction(b)}, a.trunc_degree)
    d = a - b
    if d.is_zero() or d.sign() < 0:
        return True
    return d.is_infinitesimal()


def approx_eq(a: LCNumber, b) -> bool:
    """a ~ b: the difference is infinitesimal or zero."""
    if not isinstance(b, LCNumber):
        b = LCNumber({0: _as_fraction(b)}, a.trunc_degree)
    return (a - b).is_infinitesimal()


# -- textual format: "c_-j ε^-j + ... + c_0 + c_1 ε + c_2 ε^2 + ..." -----

def _format_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_lc(x: LCNumber) -> str:
    if not x.terms:
        return "0"
    parts = []
    for i, exp in enumerate(sorted(x.terms)):
        coef = x.terms[exp]
        mag = abs(coef)
        if exp == 0:
            body = _format_coef(mag)
        else:
            sym = "ε" if exp == 1 else f"ε^{exp}"
            body = sym if mag == 1 else f"{_format_coef(mag)}{sym}"
        if i == 0:
            parts.append(body if coef > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if coef > 0 else f"- {body}")
    return " ".join(parts)


_TERM_RE = re.compile(
    r"^(?P<coef>\d+(?:/\d+|\.\d*)?|\.\d+)?"
    r"(?:\*?(?:ε|eps)(?:\^(?P<exp>-?\d+))?)?$"
)


def parse_lc(text: str, trunc_degree: int = DEFAULT_TRUNC_DEGREE) -> LCNumber:
    """Parse the textual rendering produced by :func:`format_lc`.

    Accepts "eps" as an ASCII alias for "ε" and a unicode minus sign.
    """
    s = text.replace("−", "-").replace(" ", "")
    if not s:
        raise ValueError("empty Levi-Civita literal")
    # split into signed chunks
    chunks: list[tuple[int, str]] = []
    sign, buf = 1, []
    first = True
    for ch in s:
        if ch in "+-" and buf and buf[-1] != "^":
            chunks.append((sign, "".join(buf)))
            sign, buf = (1 if ch == "+" else -1), []
        elif ch in "+-" and not buf and first:
            sign = 1 if ch == "+" else -1
        else:
            buf.append(ch)
        first = False
    if not buf:
        raise ValueError(f"dangling sign in Levi-Civita literal {text!r}")
    chunks.append((sign, "".join(buf)))

    terms: dict[int, Fraction] = {}
    for sgn, chunk in chunks:
        m = _TERM_RE.match(chunk)
        if not m or (m.group("coef") is None and "ε" not in chunk and "eps" not in chunk):
            raise ValueError(f"cannot parse term {chunk!r} in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        has_eps = "ε" in chunk or "eps" in chunk
        exp = int(m.group("exp")) if m.group("exp") else (1 if has_eps else 0)
        terms[exp] = terms.get(exp, Fraction(0)) + sgn * coef
    return LCNumber(terms, trunc_degree)

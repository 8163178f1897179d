"""Exact Gaussian-rational scalars.

Every exact computation in the package happens in Q(i).  A value is a pair of
arbitrary-precision rationals ``(re, im)``; arithmetic never rounds.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["GaussianRational", "to_exact", "parse_scalar", "format_scalar", "ZERO", "ONE"]

_MPQ = type(mpq(0))
_Q0 = mpq(0)
_Q1 = mpq(1)


def _as_mpq(value) -> _MPQ:
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        # exact binary value would be unreadable; go through the shortest repr
        return mpq(Fraction(repr(value)).limit_denominator(10**12))
    if isinstance(value, str):
        return mpq(value)
    raise TypeError(f"cannot convert {value!r} to a rational")


class GaussianRational:
    """An element ``re + im*i`` of Q(i).  Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_mpq(re))
        object.__setattr__(self, "im", _as_mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._raw(a * c, _Q0)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "GaussianRational":
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussianRational._raw(1 / a, _Q0)
        n = a * a + b * b
        return GaussianRational._raw(a / n, -b / n)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> _MPQ:
        """Field norm ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    def height(self) -> int:
        """Rough size used for pivot selection."""
        r, i = self.re, self.im
        return max(abs(r.numerator), r.denominator) + max(abs(i.numerator), i.denominator)

    # comparisons ------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError("non-real Gaussian rational has no float value")
        return float(self.re)

    def __repr__(self):
        return f"GaussianRational({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)

    def __reduce__(self):
        return (GaussianRational, (str(self.re), str(self.im)))


def _coerce(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, complex):
        return GaussianRational(_as_mpq(value.real), _as_mpq(value.imag))
    return GaussianRational._raw(_as_mpq(value), _Q0)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)

_TERM = _re.compile(r"^\s*([+-]?\s*\d+(?:/\d+)?)?\s*(?:([+-])\s*(\d+(?:/\d+)?)?\s*\*?\s*i)?\s*$")
_PURE_IMAG = _re.compile(r"^\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*i\s*$")


def parse_scalar(value) -> GaussianRational:
    """Parse a JSON scalar: an integer, a float, or a string like ``"1/2+3/4*i"``."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, float, Fraction, complex)) or isinstance(value, _MPQ):
        return _coerce(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return GaussianRational(_as_mpq(value[0]), _as_mpq(value[1]))
    if not isinstance(value, str):
        raise ValueError(f"cannot parse scalar {value!r}")
    text = value.strip().replace(" ", "")
    m = _PURE_IMAG.match(text)
    if m:
        sign = -1 if m.group(1) == "-" else 1
        mag = mpq(m.group(2)) if m.group(2) else _Q1
        return GaussianRational(0, sign * mag)
    m = _TERM.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ValueError(f"cannot parse scalar {value!r}")
    real = mpq(m.group(1).replace(" ", "")) if m.group(1) else _Q0
    imag = _Q0
    if m.group(2):
        mag = mpq(m.group(3)) if m.group(3) else _Q1
        imag = mag if m.group(2) == "+" else -mag
    return GaussianRational(real, imag)


def _fmt_q(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(z: GaussianRational) -> str:
    """Canonical string form; ``p/q+r/s*i`` (real part alone when ``im == 0``)."""
    if not z.im:
        return _fmt_q(z.re)
    sign = "-" if z.im < 0 else "+"
    return f"{_fmt_q(z.re)}{sign}{_fmt_q(abs(z.im))}*i"


def to_exact(value) -> GaussianRational:
    return parse_scalar(value)

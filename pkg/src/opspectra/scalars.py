"""Exact scalars: Gaussian rationals and squared-radius values.

All arithmetic in this module is exact; nothing here ever rounds.
"""

from __future__ import annotations

import re as _re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction, or 'p/q' string to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def format_fraction(q: Fraction) -> str:
    """Render 'p/q', or just 'p' for integers."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class QQi:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    re: Fraction
    im: Fraction

    def __post_init__(self):
        if not isinstance(self.re, Fraction) or not isinstance(self.im, Fraction):
            object.__setattr__(self, "re", as_fraction(self.re))
            object.__setattr__(self, "im", as_fraction(self.im))

    @staticmethod
    def of(re: RationalLike, im: RationalLike = 0) -> "QQi":
        return QQi(as_fraction(re), as_fraction(im))

    def __add__(self, other: "QQi") -> "QQi":
        other = _coerce(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: "QQi") -> "QQi":
        other = _coerce(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "QQi":
        return _coerce(other) - self

    def __mul__(self, other: "QQi") -> "QQi":
        other = _coerce(other)
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: "QQi") -> "QQi":
        other = _coerce(other)
        n = other.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other) -> "QQi":
        return _coerce(other) / self

    def __neg__(self) -> "QQi":
        return QQi(-self.re, -self.im)

    def conj(self) -> "QQi":
        return QQi(self.re, -self.im)

    def abs2(self) -> Fraction:
        """|z|^2, always an exact rational."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def sort_key(self):
        return (self.re, self.im)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __pow__(self, n: int) -> "QQi":
        if n < 0:
            return (QQI_ONE / self) ** (-n)
        out = QQI_ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __str__(self) -> str:
        return format_qqi(self)

    def __repr__(self) -> str:
        return f"QQi({format_qqi(self)!r})"


def _coerce(value) -> QQi:
    if isinstance(value, QQi):
        return value
    if isinstance(value, (int, Fraction)):
        return QQi(as_fraction(value), Fraction(0))
    raise TypeError(f"cannot coerce {value!r} to a Gaussian rational")


QQI_ZERO = QQi(Fraction(0), Fraction(0))
QQI_ONE = QQi(Fraction(1), Fraction(0))
QQI_I = QQi(Fraction(0), Fraction(1))


def format_qqi(z: QQi) -> str:
    """Compact form: '3', '1/2', '-1/2+2/3i', '0-1i' style."""
    if z.im == 0:
        return format_fraction(z.re)
    sign = "+" if z.im >= 0 else "-"
    return f"{format_fraction(z.re)}{sign}{format_fraction(abs(z.im))}i"


_ENTRY_RE = _re.compile(
    r"""^\s*(?P<re>[+-]?\d+(?:/\d+)?)\s*
        (?:(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)\s*i\s*)?$""",
    _re.VERBOSE,
)


def parse_qqi(text) -> QQi:
    """Parse 'p/q' or 'p/q+r/si' (space before 'i' tolerated); also
    accepts plain ints and Fractions."""
    if isinstance(text, QQi):
        return text
    if isinstance(text, (int, Fraction)):
        return _coerce(text)
    m = _ENTRY_RE.match(text)
    if not m:
        raise ValueError(f"not a Gaussian rational literal: {text!r}")
    re_part = Fraction(m.group("re"))
    if m.group("im") is None:
        return QQi(re_part, Fraction(0))
    im_part = Fraction(m.group("im"))
    if m.group("sign") == "-":
        im_part = -im_part
    return QQi(re_part, im_part)


def qqi_to_json(z: QQi) -> dict:
    return {"re": format_fraction(z.re), "im": format_fraction(z.im)}


def qqi_from_json(obj) -> QQi:
    if isinstance(obj, dict):
        return QQi(Fraction(obj["re"]), Fraction(obj["im"]))
    return parse_qqi(obj)


@dataclass(frozen=True, order=True)
class Radius:
    """A radius sqrt(square); only the square is stored, so comparison
    and scaling by |c| stay rational."""

    square: Fraction

    def __post_init__(self):
        if not isinstance(self.square, Fraction):
            object.__setattr__(self, "square", as_fraction(self.square))
        if self.square < 0:
            raise ValueError("radius square must be nonnegative")

    @staticmethod
    def of(square: RationalLike) -> "Radius":
        return Radius(as_fraction(square))

    def scaled_by(self, c: QQi) -> "Radius":
        return Radius(self.square * c.abs2())

    def is_zero(self) -> bool:
        return self.square == 0


def cmp_fraction(a: Fraction, b: Fraction) -> int:
    return (a > b) - (a < b)


def cmp_dist_plus_root(d2: Fraction, h2: Fraction, target2: Fraction) -> int:
    """Exact sign of (sqrt(d2) + sqrt(h2)) - sqrt(target2), all inputs
    squared rationals."""
    # (sqrt(d2)+sqrt(h2))^2 = d2 + h2 + 2 sqrt(d2 h2)
    t = target2 - d2 - h2
    if t < 0:
        return 1
    return cmp_fraction(4 * d2 * h2, t * t)


def cmp_dist_minus_root(d2: Fraction, h2: Fraction, target2: Fraction) -> int:
    """Exact sign of |sqrt(d2) - sqrt(h2)| - sqrt(target2)."""
    # (sqrt(d2)-sqrt(h2))^2 = d2 + h2 - 2 sqrt(d2 h2)
    s = d2 + h2 - target2
    if s < 0:
        return -1
    return cmp_fraction(s * s, 4 * d2 * h2)

"""Exact Gaussian rationals a + b*i with a, b in Q."""

from __future__ import annotations

import re
from fractions import Fraction
from math import isqrt

from gmpy2 import mpq

from .errors import ParseError, ZeroDivision

_RATIONAL_TYPES = (int, Fraction, type(mpq(0)))


def to_mpq(x):
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def format_rational(q) -> str:
    q = to_mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str):
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ParseError(f"not a rational literal: {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return mpq(int(num), int(den) if den else 1)


class Scalar:
    """Element of Q(i). Immutable; hashes agree with int/rational values when real."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", to_mpq(re))
        object.__setattr__(self, "im", to_mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def coerce(cls, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, _RATIONAL_TYPES):
            return cls(x)
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    def __add__(self, other):
        if isinstance(other, Scalar):
            return Scalar(self.re + other.re, self.im + other.im)
        if isinstance(other, _RATIONAL_TYPES):
            return Scalar(self.re + to_mpq(other), self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, Scalar):
            return Scalar(self.re - other.re, self.im - other.im)
        if isinstance(other, _RATIONAL_TYPES):
            return Scalar(self.re - to_mpq(other), self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Scalar):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                return Scalar(a * c, a * d)
            if not d:
                return Scalar(a * c, b * c)
            return Scalar(a * c - b * d, a * d + b * c)
        if isinstance(other, _RATIONAL_TYPES):
            q = to_mpq(other)
            return Scalar(self.re * q, self.im * q)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivision("division by zero in Q(i)")
            return Scalar(1 / a, 0)
        n = a * a + b * b
        return Scalar(a / n, -b / n)

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            q = to_mpq(other)
            if not q:
                raise ZeroDivision("division by zero in Q(i)")
            return Scalar(self.re / q, self.im / q)
        if isinstance(other, Scalar):
            if not other.im:
                if not other.re:
                    raise ZeroDivision("division by zero in Q(i)")
                return Scalar(self.re / other.re, self.im / other.re)
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> Scalar:
        return Scalar(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RATIONAL_TYPES):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    @property
    def is_real(self) -> bool:
        return not self.im

    def real_value(self):
        """The rational value; raises if the imaginary part is nonzero."""
        if self.im:
            raise ValueError(f"{self} is not real")
        return self.re

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        a, b = self.re, self.im
        if not b:
            return format_rational(a)
        if b == 1:
            im = "i"
        elif b == -1:
            im = "-i"
        else:
            im = format_rational(b) + "i"
        if not a:
            return im
        sep = "" if im.startswith("-") else "+"
        return f"{format_rational(a)}{sep}{im}"

    def __repr__(self):
        return f"Scalar({self})"

    def expr(self) -> str:
        """Rendering that is valid polynomial-grammar input."""
        a, b = self.re, self.im
        if not b:
            return format_rational(a)
        if b == 1:
            im = "i"
        elif b == -1:
            im = "-i"
        else:
            im = format_rational(b) + "*i"
        if not a:
            return im
        sep = " - " if im.startswith("-") else " + "
        return f"({format_rational(a)}{sep}{im.lstrip('-')})"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)

_SCALAR_RE = re.compile(
    r"""\s*(?:
        (?P<re>[+-]?\d+(?:/\d+)?)(?:(?P<sign>[+-])(?P<im1>\d+(?:/\d+)?)?\*?i)? |
        (?P<im2>[+-]?(?:\d+(?:/\d+)?)?)\*?i
    )\s*$""",
    re.X,
)


def parse_scalar(text: str) -> Scalar:
    """Parse "3/2", "1-2i", "-i", "1/2+3/4i"; other constant expressions go through the polynomial grammar."""
    if not isinstance(text, str):
        raise ParseError(f"scalar must be a string, got {type(text).__name__}")
    m = _SCALAR_RE.match(text)
    if m:
        if m.group("re") is not None:
            re_part = parse_rational(m.group("re"))
            if m.group("sign") is None:
                return Scalar(re_part)
            im_part = parse_rational(m.group("im1")) if m.group("im1") else mpq(1)
            if m.group("sign") == "-":
                im_part = -im_part
            return Scalar(re_part, im_part)
        im_text = m.group("im2")
        if im_text in ("", "+"):
            return Scalar(0, 1)
        if im_text == "-":
            return Scalar(0, -1)
        return Scalar(0, parse_rational(im_text))
    from .parser import parse_poly

    p = parse_poly(text)
    if p.variables and not p.is_constant():
        raise ParseError(f"expected a constant, got {text!r}")
    return p.constant_term()


def rational_sqrt(q):
    """Square root of a nonnegative rational if it is rational, else None."""
    q = to_mpq(q)
    if q < 0:
        return None
    n, d = int(q.numerator), int(q.denominator)
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return mpq(rn, rd)
    return None


def sqrt_in_field(target) -> tuple[Scalar, Scalar] | None:
    """Both square roots of ``target`` in Q(i), canonical one first, or None when they leave the field.

    The canonical root has positive real part, or zero real part and nonnegative imaginary part.
    """
    z = Scalar.coerce(target)
    c, d = z.re, z.im
    if not z:
        return ZERO, ZERO
    modulus = rational_sqrt(c * c + d * d)
    if modulus is None:
        return None
    a = rational_sqrt((c + modulus) / 2)
    if a is None:
        return None
    if a:
        b = d / (2 * a)
    else:
        b = rational_sqrt(-c)
        if b is None:
            return None
    root = Scalar(a, b)
    if root * root != z:
        return None
    if root.re < 0 or (not root.re and root.im < 0):
        root = -root
    return root, -root

"""Exact arithmetic in a real quadratic field Q(sqrt(d)).

Values are a + b*sqrt(d) with rational a, b and a fixed square-free integer
d > 0 (default 2).  Every comparison goes through an exact integer sign
computation; nothing here touches floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


def _is_square_free(d: int) -> bool:
    if d <= 0:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


class QuadraticNumber:
    """a + b*sqrt(d), exact.  Immutable."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Rational = 0, b: Rational = 0, d: int = 2):
        if not _is_square_free(d):
            raise ValueError(f"d must be a square-free positive integer, got {d}")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", d)

    def __setattr__(self, *args):
        raise AttributeError("QuadraticNumber is immutable")

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise ValueError(f"mixed fields sqrt({self.d}) and sqrt({other.d})")
            d = self.d if self.b != 0 or other.b == 0 else other.d
            return QuadraticNumber(other.a, other.b, d) if other.d != d else other
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(other, 0, self.d)
        return NotImplemented

    # -- field operations -------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadraticNumber(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadraticNumber(
            self.a * o.a + self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.a * o.a - o.d * o.b * o.b
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        # 1/(a+b√d) = (a−b√d)/(a²−db²)
        return self * QuadraticNumber(o.a / n, -o.b / n, self.d)

    def __rtruediv__(self, other):
        return QuadraticNumber(other, 0, self.d) / self

    # -- order ------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign: -1, 0, or 1."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: a+b√d has the sign of (a²−db²)/(a−b√d)
        t = a * a - self.d * b * b
        # a>0>b  ⇒ a−b√d > 0 ⇒ sign = sign(t); a<0<b ⇒ sign = −sign(t).
        # t = 0 impossible for a,b ≠ 0 with d square-free.
        s = (t > 0) - (t < 0)
        return s if a > 0 else -s

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() >= 0

    # -- display ----------------------------------------------------------

    def __repr__(self):
        return f"QuadraticNumber({self.a!r}, {self.b!r}, d={self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        bs = "" if self.b == 1 else ("-" if self.b == -1 else f"{self.b}*")
        root = f"{bs}sqrt{self.d}"
        if self.a == 0:
            return root
        sign = "+" if self.b > 0 else ""
        return f"{self.a}{sign}{root}" if self.b < 0 or self.b > 0 else str(self.a)


_TERM_RE = re.compile(
    r"""(?P<sign>[+-]?)\s*
        (?:
            (?:(?P<coef>\d+(?:/\d+)?)\*)?sqrt(?P<d>\d+)(?:/(?P<den>\d+))?
          | (?P<rat>\d+(?:/\d+)?)
        )\s*""",
    re.VERBOSE,
)


def parse_quadratic(text: str, d: int | None = None) -> QuadraticNumber:
    """Parse expressions like "sqrt2", "sqrt2-1", "3/2", "2*sqrt5+1/3", "sqrt2/2".

    The field is inferred from the first sqrt token (default d when none).
    """
    s = text.strip()
    if not s:
        raise ValueError("empty quadratic expression")
    pos = 0
    terms: list[tuple[Fraction, int | None]] = []
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse quadratic expression: {text!r}")
        sgn = -1 if m.group("sign") == "-" else 1
        if m.group("rat") is not None:
            terms.append((sgn * Fraction(m.group("rat")), None))
        else:
            coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
            if m.group("den"):
                coef /= int(m.group("den"))
            terms.append((sgn * coef, int(m.group("d"))))
        pos = m.end()
    ds = {root for _, root in terms if root is not None}
    if len(ds) > 1:
        raise ValueError(f"mixed radicals in {text!r}")
    field = ds.pop() if ds else (d if d is not None else 2)
    a = sum((c for c, root in terms if root is None), Fraction(0))
    b = sum((c for c, root in terms if root is not None), Fraction(0))
    return QuadraticNumber(a, b, field)

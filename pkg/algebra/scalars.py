from fractions import Fraction
from math import lcm

from algebra.parser import ExpressionParser


class EisensteinRational:
    """
    Element re + zc*z of Q(z), where z is a primitive cube root of unity (z^2 = -1 - z).
    """
    __slots__ = ("re", "zc")

    def __init__(self, re=0, zc=0):
        self.re = Fraction(re)
        self.zc = Fraction(zc)

    @staticmethod
    def _coerce(value):
        if isinstance(value, EisensteinRational):
            return value
        if isinstance(value, (int, Fraction)):
            return EisensteinRational(value)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return EisensteinRational(self.re + other.re, self.zc + other.zc)

    __radd__ = __add__

    def __neg__(self):
        return EisensteinRational(-self.re, -self.zc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return EisensteinRational(self.re - other.re, self.zc - other.zc)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.zc, other.re, other.zc
        # (a + bz)(c + dz) with z^2 = -1 - z
        return EisensteinRational(a * c - b * d, a * d + b * c - b * d)

    __rmul__ = __mul__

    def conjugate(self):
        # re + zc*z^2
        return EisensteinRational(self.re - self.zc, -self.zc)

    def norm(self) -> Fraction:
        a, b = self.re, self.zc
        return a * a - a * b + b * b

    def inv(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(z)")
        c = self.conjugate()
        return EisensteinRational(c.re / n, c.zc / n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inv()
        result = ONE
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.zc == other.zc

    def __hash__(self):
        if self.zc == 0:
            return hash(self.re)
        return hash((self.re, self.zc))

    def __bool__(self):
        return self.re != 0 or self.zc != 0

    def is_rational(self) -> bool:
        return self.zc == 0

    def is_negative(self) -> bool:
        """Sign of the first nonzero component, used when printing."""
        if self.re != 0:
            return self.re < 0
        return self.zc < 0

    def __str__(self):
        if self.zc == 0:
            return str(self.re)
        d = lcm(self.re.denominator, self.zc.denominator)
        a = int(self.re * d)
        b = int(self.zc * d)
        if b == 1:
            zpart = "z"
        elif b == -1:
            zpart = "-z"
        else:
            zpart = f"{b}*z"
        if a == 0:
            return zpart if d == 1 else f"{zpart}/{d}"
        inner = f"{a}+{zpart}" if b > 0 else f"{a}{zpart}"
        return inner if d == 1 else f"({inner})/{d}"

    def __repr__(self):
        return f"EisensteinRational({self})"


ZERO = EisensteinRational(0)
ONE = EisensteinRational(1)
ZETA = EisensteinRational(0, 1)


def _resolve(name):
    return ZETA if name == "z" else None


def _divide(a, b):
    return a / b


_scalar_parser = ExpressionParser(EisensteinRational, _resolve, _divide)


def parse_scalar(text: str) -> EisensteinRational:
    """
    Parse `a`, `a/b`, `z`, `(a+b*z)/d` and any ring expression in z.
    """
    return _scalar_parser.parse(text)

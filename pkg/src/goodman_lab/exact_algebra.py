"""Exact arithmetic on real quadratic fields, 2x2 integer matrices and torus homology.

Every comparison made downstream (slopes, contraction factors, traces) goes
through :class:`QuadExt`, whose sign is decided by rational case analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Union


class FieldMismatch(ValueError):
    pass


class NonPrimitiveClass(ValueError):
    pass


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return (f, D) with n = f**2 * D and D square-free (n > 0)."""
    if n <= 0:
        raise ValueError("need a positive integer")
    f, D, p = 1, 1, 2
    m = n
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        f *= p ** (e // 2)
        if e % 2:
            D *= p
        p += 1
    D *= m
    return f, D


def is_squarefree(D: int) -> bool:
    return D >= 1 and squarefree_decomposition(D)[0] == 1


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


@total_ordering
class QuadExt:
    """p + q*sqrt(D) with rational p, q and square-free D >= 2."""

    __slots__ = ("p", "q", "D")

    def __init__(self, p, q=0, D: int = 5):
        if not is_squarefree(D) or D < 2:
            raise ValueError(f"D must be square-free and >= 2, got {D}")
        self.p = _frac(p)
        self.q = _frac(q)
        self.D = int(D)

    # coercion
    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.D != self.D:
                raise FieldMismatch(f"Q(sqrt {self.D}) vs Q(sqrt {other.D})")
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return QuadExt(other, 0, self.D)
        return NotImplemented

    @classmethod
    def sqrt(cls, D: int) -> "QuadExt":
        return cls(0, 1, D)

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.p + o.p, self.q + o.q, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.p, -self.q, self.D)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.p - o.p, self.q - o.q, self.D)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.p * o.p + self.q * o.q * self.D,
                       self.p * o.q + self.q * o.p, self.D)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.p, -self.q, self.D)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.D

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in quadratic field")
        return QuadExt(self.p / n, -self.q / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QuadExt(1, 0, self.D), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # order
    def sign(self) -> int:
        """Exact sign of p + q*sqrt(D)."""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: the larger of p^2 and q^2 D wins (never equal)
        return sp if self.p * self.p > self.q * self.q * self.D else sq

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.D == other.D and self.p == other.p and self.q == other.q
        if isinstance(other, (int, Fraction, Rational)):
            return self.q == 0 and self.p == other
        return NotImplemented

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.D))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.p != 0 or self.q != 0

    def __float__(self):
        r = math.sqrt(self.D)
        if (self.p > 0) == (self.q > 0) or self.p == 0 or self.q == 0:
            return float(self.p) + float(self.q) * r
        # opposite signs cancel; divide the exact norm by the conjugate instead
        return float(self.norm() / (self.p - self.q * Fraction(r)))

    def is_rational(self) -> bool:
        return self.q == 0

    def __repr__(self):
        return f"QuadExt({self.p}, {self.q}, D={self.D})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        return f"{self.p} + {self.q}*sqrt({self.D})"


Scalar = Union[int, Fraction, QuadExt]


def sign_of(x: Scalar) -> int:
    if isinstance(x, QuadExt):
        return x.sign()
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class HomologyClass:
    x: int
    y: int

    def __post_init__(self):
        if not (isinstance(self.x, int) and isinstance(self.y, int)):
            raise TypeError("homology coordinates must be integers")

    @property
    def is_primitive(self) -> bool:
        return math.gcd(self.x, self.y) == 1

    def __neg__(self):
        return HomologyClass(-self.x, -self.y)

    def __add__(self, other: "HomologyClass"):
        return HomologyClass(self.x + other.x, self.y + other.y)

    def __iter__(self):
        yield self.x
        yield self.y


def intersection_number(u: HomologyClass, v: HomologyClass) -> int:
    """det of the matrix with columns u, v."""
    return u.x * v.y - u.y * v.x


@dataclass(frozen=True)
class Mat2Z:
    """Integer 2x2 matrix [[a, b], [c, d]] with an optional determinant constraint."""

    a: int
    b: int
    c: int
    d: int
    det_constraint: int | None = 1

    def __post_init__(self):
        for e in (self.a, self.b, self.c, self.d):
            if not isinstance(e, int):
                raise TypeError("Mat2Z entries must be integers")
        if self.det_constraint is not None and self.det != self.det_constraint:
            raise ValueError(f"determinant {self.det} violates constraint {self.det_constraint}")

    @classmethod
    def from_rows(cls, rows, det_constraint: int | None = 1) -> "Mat2Z":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d), det_constraint)

    @classmethod
    def identity(cls) -> "Mat2Z":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def _constraint_for(self, det: int) -> int | None:
        return det if det in (1, -1) else None

    def __matmul__(self, o: "Mat2Z") -> "Mat2Z":
        a = self.a * o.a + self.b * o.c
        b = self.a * o.b + self.b * o.d
        c = self.c * o.a + self.d * o.c
        d = self.c * o.b + self.d * o.d
        return Mat2Z(a, b, c, d, self._constraint_for(a * d - b * c))

    def inverse(self) -> "Mat2Z":
        if self.det not in (1, -1):
            raise ValueError("only unimodular matrices are invertible over Z")
        s = self.det
        return Mat2Z(s * self.d, -s * self.b, -s * self.c, s * self.a, self.det)

    def __pow__(self, n: int) -> "Mat2Z":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Mat2Z(1, 0, 0, 1, 1), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def apply(self, v):
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def sup_norm(self) -> int:
        return max(abs(self.a) + abs(self.b), abs(self.c) + abs(self.d))

    def with_constraint(self, det_constraint: int | None) -> "Mat2Z":
        return Mat2Z(self.a, self.b, self.c, self.d, det_constraint)

    def key(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


def twist_matrix(c: HomologyClass, n: int) -> Mat2Z:
    """n-th power of [[1 + x y, -x^2], [y^2, 1 - x y]] for the class (x, y).

    The displayed matrix is I + N with N nilpotent, so the power is I + n N.
    """
    if not c.is_primitive:
        raise NonPrimitiveClass(f"twist class {tuple(c)} is not primitive")
    x, y = c.x, c.y
    return Mat2Z(1 + n * x * y, -n * x * x, n * y * y, 1 - n * x * y)


@total_ordering
class ExtendedSlope:
    """A finite QuadExt slope or the single point at infinity (the stable direction)."""

    __slots__ = ("value",)

    def __init__(self, value: QuadExt | None):
        self.value = value

    @classmethod
    def finite(cls, value, D: int = 5) -> "ExtendedSlope":
        if not isinstance(value, QuadExt):
            value = QuadExt(value, 0, D)
        return cls(value)

    @classmethod
    def infinite(cls) -> "ExtendedSlope":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __neg__(self):
        return self if self.value is None else ExtendedSlope(-self.value)

    def scale(self, factor: QuadExt | Fraction | int) -> "ExtendedSlope":
        if sign_of(factor) <= 0:
            raise ValueError("slopes may only be scaled by positive factors")
        return self if self.value is None else ExtendedSlope(self.value * factor)

    def sign(self) -> int | None:
        return None if self.value is None else self.value.sign()

    def __eq__(self, other):
        if not isinstance(other, ExtendedSlope):
            return NotImplemented
        return compare_slopes(self, other) == 0

    def __lt__(self, other):
        if not isinstance(other, ExtendedSlope):
            return NotImplemented
        return compare_slopes(self, other) < 0

    def __hash__(self):
        return hash(None) if self.value is None else hash(self.value)

    def __float__(self):
        return math.inf if self.value is None else float(self.value)

    def __repr__(self):
        return "Infinite" if self.value is None else f"Finite({self.value!s})"


def compare_slopes(s1: ExtendedSlope, s2: ExtendedSlope) -> int:
    """-1, 0, 1 for less, equal, greater."""
    if s1.value is None or s2.value is None:
        return (s1.value is None) - (s2.value is None)
    if s1.value.D != s2.value.D:
        raise FieldMismatch(f"slopes over Q(sqrt {s1.value.D}) and Q(sqrt {s2.value.D})")
    return (s1.value - s2.value).sign()

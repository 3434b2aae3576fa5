"""Exact arithmetic in Q and in real quadratic fields Q(sqrt(D)).

Rationals are plain ``fractions.Fraction``.  A QuadraticNumber is a + b*sqrt(D)
with rational a, b and a square-free non-negative integer D; all comparisons
are decided by integer arithmetic (squaring with sign bookkeeping), never by
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateMatrixError, FieldMismatchError, ValdynError

Rational = Fraction


def _squarefree_split(n):
    """n = s^2 * d with d square-free; returns (s, d)."""
    if n < 0:
        raise ValdynError("negative radicand")
    s, d, p = 1, 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    return s, d * n


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected rational, got {type(x).__name__}")


@dataclass(frozen=True)
class QuadraticNumber:
    """Element a + b*sqrt(D) of a real quadratic field, in canonical form."""

    a: Fraction
    b: Fraction
    D: int

    def __post_init__(self):
        object.__setattr__(self, "a", _as_fraction(self.a))
        object.__setattr__(self, "b", _as_fraction(self.b))
        if self.D < 0:
            raise ValdynError("D must be non-negative")
        s, d = _squarefree_split(self.D)
        if s != 1:
            object.__setattr__(self, "b", self.b * s)
            object.__setattr__(self, "D", d)
        if self.D in (0, 1):
            object.__setattr__(self, "a", self.a + self.b * self.D)
            object.__setattr__(self, "b", Fraction(0))
            object.__setattr__(self, "D", 0)
        if self.b == 0 and self.D != 0:
            object.__setattr__(self, "D", 0)

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def of(x) -> "QuadraticNumber":
        if isinstance(x, QuadraticNumber):
            return x
        return QuadraticNumber(_as_fraction(x), Fraction(0), 0)

    @staticmethod
    def sqrt_of(n: int) -> "QuadraticNumber":
        return QuadraticNumber(Fraction(0), Fraction(1), n)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise ValdynError(f"{self} is irrational")
        return self.a

    # -- field arithmetic ----------------------------------------------------

    def _common_D(self, other):
        if self.D == 0:
            return other.D
        if other.D == 0 or other.D == self.D:
            return self.D
        raise FieldMismatchError(f"sqrt({self.D}) vs sqrt({other.D})")

    def __add__(self, other):
        other = QuadraticNumber.of(other)
        d = self._common_D(other)
        return QuadraticNumber(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-QuadraticNumber.of(other))

    def __rsub__(self, other):
        return QuadraticNumber.of(other) - self

    def __mul__(self, other):
        other = QuadraticNumber.of(other)
        d = self._common_D(other)
        return QuadraticNumber(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QuadraticNumber.of(other)
        d = self._common_D(other)
        norm = other.a * other.a - other.b * other.b * d
        if norm == 0:
            if other.a == 0 and other.b == 0:
                raise ZeroDivisionError("division by zero")
            raise ValdynError("division by zero norm element")
        inv = QuadraticNumber(other.a / norm, -other.b / norm, d)
        return self * inv

    def __rtruediv__(self, other):
        return QuadraticNumber.of(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return QuadraticNumber.of(1) / self ** (-n)
        r = QuadraticNumber.of(1)
        base = self
        while n:
            if n & 1:
                r = r * base
            base = base * base
            n >>= 1
        return r

    def conjugate(self):
        return QuadraticNumber(self.a, -self.b, self.D)

    # -- exact ordering ------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(D), by integer comparison only."""
        a, b, d = self.a, self.b, self.D
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 against b^2 * D
        lhs, rhs = a * a, b * b * d
        if lhs == rhs:
            return 0
        bigger_rational = lhs > rhs
        if a > 0:
            return 1 if bigger_rational else -1
        return -1 if bigger_rational else 1

    def _cmp(self, other) -> int:
        return (self - QuadraticNumber.of(other)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (QuadraticNumber, Fraction, int)):
            return self._cmp(other) == 0
        return NotImplemented

    def __hash__(self):
        if self.is_rational:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def floor(self) -> int:
        """Exact integer floor, float-seeded then adjusted by exact compares."""
        if self.is_rational:
            return math.floor(self.a)
        n = math.floor(float(self.a) + float(self.b) * math.sqrt(self.D))
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    # -- rendering -----------------------------------------------------------

    def __str__(self):
        if self.is_rational:
            return str(self.a)
        parts = []
        if self.a != 0:
            parts.append(str(self.a))
        coeff = "" if self.b == 1 else ("-" if self.b == -1 else f"{self.b}*")
        term = f"{coeff}sqrt({self.D})"
        if parts and self.b > 0:
            return f"{parts[0]} + {term}"
        if parts:
            return f"{parts[0]} - {term.lstrip('-')}" if self.b < 0 else f"{parts[0]} + {term}"
        return term

    __repr__ = __str__

    def to_json(self):
        return {
            "a": {"num": self.a.numerator, "den": self.a.denominator},
            "b": {"num": self.b.numerator, "den": self.b.denominator},
            "D": self.D,
        }

    @staticmethod
    def from_json(obj):
        return QuadraticNumber(
            Fraction(obj["a"]["num"], obj["a"]["den"]),
            Fraction(obj["b"]["num"], obj["b"]["den"]),
            obj["D"],
        )


QN = QuadraticNumber


def qn_arith(x: QN, y: QN, op: str) -> QN:
    """Dispatch form of field arithmetic: op in {add, sub, mul, div}."""
    x, y = QN.of(x), QN.of(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValdynError(f"unknown op {op!r}")


def qn_compare(x: QN, y: QN) -> int:
    """Exact three-way comparison: -1, 0 or 1."""
    return QN.of(x)._cmp(y)


@dataclass(frozen=True)
class QuadraticInteger:
    """An algebraic integer of degree at most 2, with its minimal polynomial.

    Degree 2: value is the larger real root of X^2 + p*X + q.
    Degree 1: value is the integer root itself.
    """

    value: QuadraticNumber
    p: int
    q: int
    degree: int

    @staticmethod
    def from_value(v: QN) -> "QuadraticInteger":
        v = QN.of(v)
        if v.is_rational:
            if v.a.denominator != 1:
                raise ValdynError(f"{v} is not an algebraic integer")
            r = int(v.a)
            return QuadraticInteger(v, -r, 0, 1)
        tr = 2 * v.a
        nrm = v.a * v.a - v.b * v.b * v.D
        if tr.denominator != 1 or nrm.denominator != 1:
            raise ValdynError(f"{v} is not a quadratic integer")
        if v.b < 0:
            raise ValdynError(f"{v} is the smaller root of its minimal polynomial")
        return QuadraticInteger(v, -int(tr), int(nrm), 2)

    def minpoly_str(self) -> str:
        if self.degree == 1:
            c = -self.p
            return f"X - {c}" if c >= 0 else f"X + {-c}"
        s = "X^2"
        if self.p:
            coeff = abs(self.p)
            cs = "" if coeff == 1 else str(coeff)
            s += f" - {cs}X" if self.p < 0 else f" + {cs}X"
        if self.q:
            s += f" - {-self.q}" if self.q < 0 else f" + {self.q}"
        return s

    def __str__(self):
        return f"{self.value} (minpoly: {self.minpoly_str()})"

    def to_json(self):
        return {
            "value": self.value.to_json(),
            "minpoly": {"p": self.p, "q": self.q, "degree": self.degree},
        }


def spectral_radius_2x2(a: int, b: int, c: int, d: int) -> QuadraticInteger:
    """Largest real root of X^2 - (a+d)X + (ad - bc), as a quadratic integer.

    Entries must be non-negative with ad != bc.
    """
    if min(a, b, c, d) < 0:
        raise ValdynError("matrix entries must be non-negative")
    if a * d == b * c:
        raise DegenerateMatrixError(f"ad = bc = {a * d}")
    tr, det = a + d, a * d - b * c
    disc = tr * tr - 4 * det
    s = math.isqrt(disc)
    if s * s == disc:
        root = Fraction(tr + s, 2)
        return QuadraticInteger.from_value(QN.of(root))
    value = QN(Fraction(tr, 2), Fraction(1, 2), disc)
    return QuadraticInteger(value, -tr, det, 2)

# src/algebra/scalars.py
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from numbers import Rational
from typing import Sequence

from src.errors import DomainError, InputError


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise InputError(f"Not an exact rational: {value!r}")


def _rat_sqrt(q: Fraction) -> Fraction | None:
    """Rational square root of a non-negative rational, or None."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


# ===== Define the Scalar class =====
class Scalar:
    """Element a + b√2 + c·i + d·√2·i of the field ℚ(√2, i).

    Components are Fractions, so they are always in lowest terms. Instances are
    immutable and hash by value. Plain ints and Fractions compare equal to the
    matching rational Scalar.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))
        object.__setattr__(self, "c", _frac(c))
        object.__setattr__(self, "d", _frac(d))

    def __setattr__(self, key, value):
        raise AttributeError("Scalar is immutable")

    # ----- constructors -----
    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return cls(_frac(value))

    @classmethod
    def sqrt2(cls) -> "Scalar":
        return cls(0, 1)

    @classmethod
    def imag(cls) -> "Scalar":
        return cls(0, 0, 1)

    @classmethod
    def sqrt_of_rational(cls, q) -> "Scalar":
        """Exact square root of ±r² or ±2r² for rational r."""
        q = _frac(q)
        if q == 0:
            return cls()
        unit = cls(1) if q > 0 else cls.imag()
        q = abs(q)
        r = _rat_sqrt(q)
        if r is not None:
            return unit * cls(r)
        r = _rat_sqrt(q / 2)
        if r is not None:
            return unit * cls(0, r)
        raise DomainError(f"No square root of {q} in Q(sqrt2, i)")

    @classmethod
    def two_power_half(cls, k: int) -> "Scalar":
        """2^(k/2) for any integer k."""
        half, odd = divmod(k, 2)
        base = cls(Fraction(2) ** half)
        return base * cls(0, 1) if odd else base

    # ----- predicates -----
    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def is_real(self) -> bool:
        return self.c == 0 and self.d == 0

    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0 and self.d == 0

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise DomainError(f"{self} is not rational")
        return self.a

    # ----- arithmetic -----
    def __add__(self, other):
        try:
            o = Scalar.coerce(other)
        except InputError:
            return NotImplemented
        return Scalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        try:
            o = Scalar.coerce(other)
        except InputError:
            return NotImplemented
        return Scalar(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        try:
            o = Scalar.coerce(other)
        except InputError:
            return NotImplemented
        # (u1 + i v1)(u2 + i v2) with u, v in Q(sqrt2)
        ua, ub = _qmul(self.a, self.b, o.a, o.b)
        va, vb = _qmul(self.c, self.d, o.c, o.d)
        wa, wb = _qmul(self.a, self.b, o.c, o.d)
        za, zb = _qmul(self.c, self.d, o.a, o.b)
        return Scalar(ua - va, ub - vb, wa + za, wb + zb)

    __rmul__ = __mul__

    def conj(self) -> "Scalar":
        return Scalar(self.a, self.b, -self.c, -self.d)

    def norm(self) -> "Scalar":
        """x·conj(x), an element of ℚ(√2)."""
        return self * self.conj()

    def inv(self) -> "Scalar":
        if self.is_zero():
            raise DomainError("Inversion of zero")
        # x * conj(x) = u^2 + v^2 lies in Q(sqrt2)
        na, nb = _qmul(self.a, self.b, self.a, self.b)
        ma, mb = _qmul(self.c, self.d, self.c, self.d)
        n0, n1 = na + ma, nb + mb
        denom = n0 * n0 - 2 * n1 * n1
        return self.conj() * Scalar(n0 / denom, -n1 / denom)

    def __truediv__(self, other):
        return self * Scalar.coerce(other).inv()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inv()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise InputError("Scalar powers must be integers")
        if exponent < 0:
            return self.inv() ** (-exponent)
        result, base = Scalar(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # ----- comparison -----
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.a)
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self):
        return not self.is_zero()

    # ----- rendering -----
    def render(self) -> str:
        """Grammar-compatible text, e.g. `1/2 - sqrt2*I`."""
        parts = []
        for value, unit in ((self.a, ""), (self.b, "sqrt2"), (self.c, "I"), (self.d, "sqrt2*I")):
            if value == 0:
                continue
            if not unit:
                parts.append(str(value))
            elif value == 1:
                parts.append(unit)
            elif value == -1:
                parts.append("-" + unit)
            else:
                parts.append(f"{value}*{unit}")
        if not parts:
            return "0"
        text = parts[0]
        for part in parts[1:]:
            text += " - " + part[1:] if part.startswith("-") else " + " + part
        return text

    def is_single_component(self) -> bool:
        return sum(1 for v in (self.a, self.b, self.c, self.d) if v) <= 1

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Scalar({self.render()})"


def _qmul(p, q, r, s):
    """(p + q√2)(r + s√2) in Q(sqrt2)."""
    return p * r + 2 * q * s, p * s + q * r


ZERO = Scalar()
ONE = Scalar(1)
HALF = Scalar(Fraction(1, 2))
SQRT2 = Scalar.sqrt2()
I = Scalar.imag()


# ===== Exact linear algebra over Q(sqrt2, i) =====
Matrix = list[list[Scalar]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Scalar.coerce(v) for v in row] for row in rows]


def identity_matrix(size: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(size)] for i in range(size)]


def matrix_inverse(rows: Sequence[Sequence]) -> Matrix:
    """Gauss-Jordan inverse; raises DomainError when singular."""
    size = len(rows)
    work = [list(row) + ident for row, ident in zip(to_matrix(rows), identity_matrix(size))]
    for col in range(size):
        pivot = next((r for r in range(col, size) if not work[r][col].is_zero()), None)
        if pivot is None:
            raise DomainError("Singular matrix")
        work[col], work[pivot] = work[pivot], work[col]
        scale = work[col][col].inv()
        work[col] = [v * scale for v in work[col]]
        for r in range(size):
            if r != col and not work[r][col].is_zero():
                factor = work[r][col]
                work[r] = [v - factor * w for v, w in zip(work[r], work[col])]
    return [row[size:] for row in work]


def determinant(rows: Sequence[Sequence]) -> Scalar:
    work = to_matrix(rows)
    size = len(work)
    det = ONE
    for col in range(size):
        pivot = next((r for r in range(col, size) if not work[r][col].is_zero()), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det = det * work[col][col]
        inv = work[col][col].inv()
        for r in range(col + 1, size):
            if not work[r][col].is_zero():
                factor = work[r][col] * inv
                work[r] = [v - factor * w for v, w in zip(work[r], work[col])]
    return det


def matmul(left: Sequence[Sequence[Scalar]], right: Sequence[Sequence[Scalar]]) -> Matrix:
    inner = len(right)
    cols = len(right[0]) if inner else 0
    return [
        [sum((row[k] * right[k][j] for k in range(inner)), ZERO) for j in range(cols)]
        for row in left
    ]


def transpose(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    return [list(col) for col in zip(*rows)] if rows else []


if __name__ == "__main__":
    try:
        x = Scalar(1, 1)
        assert x * x.inv() == 1
        assert SQRT2 * SQRT2 == 2 and I * I == -1
        assert Scalar(1, 1).inv() == Scalar(-1, 1)
        print("✅ scalars self-check passed")
    except Exception as e:
        print(f"❌ scalars self-check failed: {e}")

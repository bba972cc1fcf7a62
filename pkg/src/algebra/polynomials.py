# src/algebra/polynomials.py
from __future__ import annotations

from fractions import Fraction
from itertools import product as cartesian
from math import comb

import numpy as np

from src.algebra.scalars import ONE, ZERO, Scalar
from src.errors import DimensionError, InputError

Exponent = tuple[int, ...]


# ===== Define the BasePolynomial class =====
class BasePolynomial:
    """Polynomial in x^1..x^n with ℚ(√2, i) coefficients.

    Stored as a dict exponent-tuple -> Scalar with no zero entries. n = 0 is
    allowed and gives the constants. The class purposely has no sequence
    protocol so numpy keeps instances as opaque object-array cells.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[Exponent, Scalar] | None = None):
        if n < 0:
            raise InputError("Polynomial dimension must be >= 0")
        self.n = n
        self.terms: dict[Exponent, Scalar] = {}
        for exp, coef in (terms or {}).items():
            if len(exp) != n:
                raise DimensionError(f"Exponent {exp} does not have length {n}")
            coef = Scalar.coerce(coef)
            if not coef.is_zero():
                self.terms[tuple(exp)] = coef

    # ----- constructors -----
    @classmethod
    def zero(cls, n: int) -> "BasePolynomial":
        return cls(n)

    @classmethod
    def constant(cls, value, n: int) -> "BasePolynomial":
        return cls(n, {(0,) * n: Scalar.coerce(value)})

    @classmethod
    def one(cls, n: int) -> "BasePolynomial":
        return cls.constant(ONE, n)

    @classmethod
    def variable(cls, i: int, n: int) -> "BasePolynomial":
        """x^i, 1-based."""
        if not 1 <= i <= n:
            raise InputError(f"Variable x{i} outside dimension {n}")
        exp = [0] * n
        exp[i - 1] = 1
        return cls(n, {tuple(exp): ONE})

    @classmethod
    def monomial(cls, exp: Exponent, coef=ONE) -> "BasePolynomial":
        return cls(len(exp), {tuple(exp): coef})

    def _lift(self, other) -> "BasePolynomial | None":
        if isinstance(other, BasePolynomial):
            if other.n != self.n:
                raise DimensionError(f"Polynomial dimensions differ: {self.n} vs {other.n}")
            return other
        try:
            return BasePolynomial.constant(Scalar.coerce(other), self.n)
        except InputError:
            return None

    # ----- predicates -----
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Scalar:
        return self.terms.get((0,) * self.n, ZERO)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    # ----- arithmetic -----
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for exp, coef in o.terms.items():
            terms[exp] = terms.get(exp, ZERO) + coef
        return BasePolynomial(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return BasePolynomial(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms: dict[Exponent, Scalar] = {}
        for (e1, c1), (e2, c2) in cartesian(self.terms.items(), o.terms.items()):
            exp = tuple(a + b for a, b in zip(e1, e2))
            terms[exp] = terms.get(exp, ZERO) + c1 * c2
        return BasePolynomial(self.n, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise InputError("Polynomial powers must be non-negative integers")
        result = BasePolynomial.one(self.n)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor) -> "BasePolynomial":
        factor = Scalar.coerce(factor)
        return BasePolynomial(self.n, {e: c * factor for e, c in self.terms.items()})

    def conj(self) -> "BasePolynomial":
        return BasePolynomial(self.n, {e: c.conj() for e, c in self.terms.items()})

    def partial(self, i: int, times: int = 1) -> "BasePolynomial":
        """∂/∂x^i applied `times` times, 1-based."""
        if not 1 <= i <= self.n:
            raise InputError(f"Derivative d{i} outside dimension {self.n}")
        result = self
        for _ in range(times):
            terms: dict[Exponent, Scalar] = {}
            for exp, coef in result.terms.items():
                k = exp[i - 1]
                if k == 0:
                    continue
                new = list(exp)
                new[i - 1] = k - 1
                terms[tuple(new)] = coef * k
            result = BasePolynomial(self.n, terms)
        return result

    def multi_partial(self, orders: Exponent) -> "BasePolynomial":
        result = self
        for i, k in enumerate(orders, start=1):
            if k:
                result = result.partial(i, k)
        return result

    def evaluate(self, point) -> Scalar:
        point = [Scalar.coerce(v) for v in point]
        if len(point) != self.n:
            raise DimensionError(f"Point has {len(point)} coordinates, expected {self.n}")
        total = ZERO
        for exp, coef in self.terms.items():
            value = coef
            for v, k in zip(point, exp):
                value = value * v**k
            total = total + value
        return total

    # ----- comparison -----
    def __eq__(self, other):
        if isinstance(other, BasePolynomial):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (Scalar, int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    # ----- rendering -----
    def sorted_terms(self) -> list[tuple[Exponent, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), [-k for k in t[0]]))

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = [render_term(c, render_monomial(e)) for e, c in self.sorted_terms()]
        return join_signed(pieces)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"BasePolynomial(n={self.n}, {self.render()})"


def render_monomial(exp: Exponent, name: str = "x") -> str:
    factors = []
    for i, k in enumerate(exp, start=1):
        if k == 1:
            factors.append(f"{name}{i}")
        elif k > 1:
            factors.append(f"{name}{i}^{k}")
    return "*".join(factors)


def render_term(coef: Scalar, body: str) -> str:
    """`coef*body` in grammar syntax; body may be empty."""
    if not body:
        return coef.render()
    if coef == 1:
        return body
    if coef == -1:
        return "-" + body
    if coef.is_single_component():
        return f"{coef.render()}*{body}"
    return f"({coef.render()})*{body}"


def join_signed(pieces: list[str]) -> str:
    text = pieces[0]
    for piece in pieces[1:]:
        text += " - " + piece[1:] if piece.startswith("-") else " + " + piece
    return text


def multi_binomial(beta: Exponent, delta: Exponent) -> int:
    result = 1
    for b, d in zip(beta, delta):
        result *= comb(b, d)
    return result


def sub_multi_indices(beta: Exponent):
    """All δ ≤ β componentwise."""
    return cartesian(*(range(b + 1) for b in beta))


def scale_array(array: np.ndarray, factor) -> np.ndarray:
    """Scale every cell of an object array of polynomials or scalars."""
    return np.frompyfunc(lambda cell: cell * factor, 1, 1)(array)


def random_polynomial(
    n: int,
    rng: np.random.Generator,
    max_degree: int = 2,
    max_terms: int = 3,
    complex_coefficients: bool = False,
) -> BasePolynomial:
    """Small random polynomial with integer (or Gaussian) coefficients."""
    terms: dict[Exponent, Scalar] = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        degree = int(rng.integers(0, max_degree + 1))
        exp = [0] * n
        for _ in range(degree if n else 0):
            exp[int(rng.integers(0, n))] += 1
        coef = Scalar(int(rng.integers(-3, 4)), 0, int(rng.integers(-2, 3)) if complex_coefficients else 0)
        terms[tuple(exp)] = terms.get(tuple(exp), ZERO) + coef
    return BasePolynomial(n, terms)


if __name__ == "__main__":
    try:
        x1, x2 = BasePolynomial.variable(1, 2), BasePolynomial.variable(2, 2)
        f = (x1 + x2) ** 2
        assert f.partial(1) == 2 * x1 + 2 * x2
        print(f"✅ polynomials self-check passed: {f}")
    except Exception as e:
        print(f"❌ polynomials self-check failed: {e}")

# src/algebra/symbols.py
from __future__ import annotations

from collections import defaultdict
from itertools import combinations
from typing import Callable, Iterable, Sequence

from src.algebra.polynomials import BasePolynomial, join_signed, render_monomial, render_term
from src.algebra.scalars import ONE, Scalar, determinant, matrix_inverse, to_matrix
from src.errors import DegenerateMetricError, DimensionError, DomainError, InputError

Subset = tuple[int, ...]
Exponent = tuple[int, ...]
TermKey = tuple[Subset, Exponent]


# ===== Define the ModelSignature class =====
class ModelSignature:
    """Base dimension n, fiber rank m and a constant non-degenerate metric g_ab."""

    __slots__ = ("n", "m", "metric", "metric_inverse", "_key")

    def __init__(self, n: int, m: int, metric: Sequence[Sequence] | None = None):
        if n < 0 or m < 0:
            raise InputError("Dimensions must be non-negative")
        if metric is None:
            metric = [[1 if a == b else 0 for b in range(m)] for a in range(m)]
        rows = to_matrix(metric)
        if len(rows) != m or any(len(row) != m for row in rows):
            raise DimensionError(f"Metric must be {m}x{m}")
        for a in range(m):
            for b in range(a + 1, m):
                if rows[a][b] != rows[b][a]:
                    raise DegenerateMetricError(f"Metric is not symmetric at ({a + 1}, {b + 1})")
        if any(not v.is_real() for row in rows for v in row):
            raise DegenerateMetricError("Metric entries must be real")
        if m and determinant(rows).is_zero():
            raise DegenerateMetricError("Metric is degenerate")
        self.n = n
        self.m = m
        self.metric = tuple(tuple(row) for row in rows)
        self.metric_inverse = tuple(tuple(row) for row in matrix_inverse(rows)) if m else ()
        self._key = (n, m, self.metric)

    def g(self, a: int, b: int) -> Scalar:
        """Metric entry, 1-based."""
        return self.metric[a - 1][b - 1]

    def g_inv(self, a: int, b: int) -> Scalar:
        return self.metric_inverse[a - 1][b - 1]

    def pairing(self, u: Sequence, v: Sequence):
        """g(u, v) for coefficient vectors of polynomials or scalars."""
        total = BasePolynomial.zero(self.n)
        for a in range(self.m):
            for b in range(self.m):
                if not self.metric[a][b].is_zero():
                    total = total + u[a] * v[b] * self.metric[a][b]
        return total

    def raise_index(self, covector: Sequence) -> list:
        """v^b = Σ_a g^{ba} v_a."""
        return [
            sum((covector[a] * self.metric_inverse[b][a] for a in range(self.m)), BasePolynomial.zero(self.n))
            for b in range(self.m)
        ]

    def __eq__(self, other):
        return isinstance(other, ModelSignature) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"ModelSignature(n={self.n}, m={self.m})"


def merge_subsets(left: Subset, right: Subset) -> tuple[int, Subset] | None:
    """Sign and sorted union of ξ_left·ξ_right, or None when they overlap."""
    if set(left) & set(right):
        return None
    inversions = sum(1 for a in left for b in right if a > b)
    return (-1) ** inversions, tuple(sorted(left + right))


def _sign(k: int) -> Scalar:
    return ONE if k % 2 == 0 else -ONE


# ===== Define the GradedFunction class =====
class GradedFunction:
    """Polynomial graded symbol Σ f_{A,β}(x) ξ_A p^β on T*[2]M ⊕ E[1].

    Keys are (A, β) with A a strictly increasing tuple of fiber indices and β
    an exponent tuple in the momenta. Degree of a term is |A| + 2|β|.
    """

    __slots__ = ("sig", "terms")

    def __init__(self, sig: ModelSignature, terms: dict[TermKey, BasePolynomial] | None = None):
        self.sig = sig
        self.terms: dict[TermKey, BasePolynomial] = {}
        for (subset, beta), coef in (terms or {}).items():
            subset, beta = tuple(subset), tuple(beta)
            if list(subset) != sorted(set(subset)) or any(not 1 <= a <= sig.m for a in subset):
                raise InputError(f"Invalid odd index set {subset}")
            if len(beta) != sig.n:
                raise DimensionError(f"Momentum exponent {beta} does not have length {sig.n}")
            coef = _as_polynomial(coef, sig.n)
            if not coef.is_zero():
                self.terms[(subset, beta)] = coef

    # ----- constructors -----
    @classmethod
    def zero(cls, sig: ModelSignature) -> "GradedFunction":
        return cls(sig)

    @classmethod
    def function(cls, sig: ModelSignature, value) -> "GradedFunction":
        return cls(sig, {((), (0,) * sig.n): _as_polynomial(value, sig.n)})

    @classmethod
    def one(cls, sig: ModelSignature) -> "GradedFunction":
        return cls.function(sig, ONE)

    @classmethod
    def x(cls, sig: ModelSignature, i: int) -> "GradedFunction":
        return cls.function(sig, BasePolynomial.variable(i, sig.n))

    @classmethod
    def xi(cls, sig: ModelSignature, a: int) -> "GradedFunction":
        if not 1 <= a <= sig.m:
            raise DimensionError(f"Odd generator xi{a} outside rank {sig.m}")
        return cls(sig, {((a,), (0,) * sig.n): BasePolynomial.one(sig.n)})

    @classmethod
    def p(cls, sig: ModelSignature, i: int) -> "GradedFunction":
        if not 1 <= i <= sig.n:
            raise DimensionError(f"Momentum p{i} outside dimension {sig.n}")
        beta = [0] * sig.n
        beta[i - 1] = 1
        return cls(sig, {((), tuple(beta)): BasePolynomial.one(sig.n)})

    @classmethod
    def monomial(cls, sig: ModelSignature, subset: Subset, beta: Exponent, coef=ONE) -> "GradedFunction":
        return cls(sig, {(tuple(subset), tuple(beta)): coef})

    # ----- predicates and degrees -----
    def is_zero(self) -> bool:
        return not self.terms

    def is_p_free(self) -> bool:
        return all(sum(beta) == 0 for _, beta in self.terms)

    def restrict_p_free(self) -> "GradedFunction":
        """Terms without momenta, the restriction to E[1]."""
        return GradedFunction(self.sig, {k: c for k, c in self.terms.items() if sum(k[1]) == 0})

    def degrees(self) -> set[int]:
        return {len(a) + 2 * sum(b) for a, b in self.terms}

    def homogeneous_degree(self) -> int:
        """Degree of a homogeneous symbol; zero counts as degree 0."""
        degrees = self.degrees()
        if len(degrees) > 1:
            raise DomainError(f"Symbol is not homogeneous (degrees {sorted(degrees)})")
        return degrees.pop() if degrees else 0

    def parity(self) -> int:
        parities = {len(a) % 2 for a, _ in self.terms}
        if len(parities) > 1:
            raise DomainError("Symbol has mixed parity")
        return parities.pop() if parities else 0

    def euler_decompose(self) -> dict[int, "GradedFunction"]:
        """Homogeneous components by degree, zero components omitted."""
        parts: dict[int, dict] = defaultdict(dict)
        for (subset, beta), coef in self.terms.items():
            parts[len(subset) + 2 * sum(beta)][(subset, beta)] = coef
        return {k: GradedFunction(self.sig, v) for k, v in sorted(parts.items())}

    def homogeneous_part(self, degree: int) -> "GradedFunction":
        return GradedFunction(
            self.sig, {k: c for k, c in self.terms.items() if len(k[0]) + 2 * sum(k[1]) == degree}
        )

    def parity_decompose(self) -> dict[int, "GradedFunction"]:
        parts: dict[int, dict] = {0: {}, 1: {}}
        for key, coef in self.terms.items():
            parts[len(key[0]) % 2][key] = coef
        return {p: GradedFunction(self.sig, t) for p, t in parts.items()}

    # ----- arithmetic -----
    def _check(self, other: "GradedFunction"):
        if other.sig != self.sig:
            raise DimensionError("Symbols live on different signatures")

    def __add__(self, other):
        if not isinstance(other, GradedFunction):
            try:
                other = GradedFunction.function(self.sig, other)
            except InputError:
                return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            terms[key] = terms[key] + coef if key in terms else coef
        return GradedFunction(self.sig, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedFunction(self.sig, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GradedFunction):
            return gf_product(self, other)
        try:
            factor = _as_polynomial(other, self.sig.n)
        except InputError:
            return NotImplemented
        return self.map_coefficients(lambda c: c * factor)

    def __rmul__(self, other):
        # polynomials and scalars are even, so they commute with every term
        return self.__mul__(other)

    def __pow__(self, exponent: int):
        result = GradedFunction.one(self.sig)
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor) -> "GradedFunction":
        factor = Scalar.coerce(factor)
        return self.map_coefficients(lambda c: c.scale(factor))

    def map_coefficients(self, fn: Callable[[BasePolynomial], BasePolynomial]) -> "GradedFunction":
        return GradedFunction(self.sig, {k: fn(c) for k, c in self.terms.items()})

    def conj(self) -> "GradedFunction":
        return self.map_coefficients(BasePolynomial.conj)

    # ----- derivatives -----
    def x_partial(self, i: int) -> "GradedFunction":
        return self.map_coefficients(lambda c: c.partial(i))

    def p_partial(self, i: int) -> "GradedFunction":
        terms: dict[TermKey, BasePolynomial] = {}
        for (subset, beta), coef in self.terms.items():
            k = beta[i - 1]
            if k:
                new = list(beta)
                new[i - 1] = k - 1
                terms[(subset, tuple(new))] = coef * k
        return GradedFunction(self.sig, terms)

    def _odd_derivative(self, a: int, from_right: bool) -> "GradedFunction":
        terms: dict[TermKey, BasePolynomial] = {}
        for (subset, beta), coef in self.terms.items():
            if a not in subset:
                continue
            j = subset.index(a)
            moves = len(subset) - 1 - j if from_right else j
            key = (subset[:j] + subset[j + 1:], beta)
            terms[key] = coef if moves % 2 == 0 else -coef
        return GradedFunction(self.sig, terms)

    def right_derivative(self, a: int) -> "GradedFunction":
        """F ∂←/∂ξ_a."""
        return self._odd_derivative(a, from_right=True)

    def left_derivative(self, a: int) -> "GradedFunction":
        """∂→/∂ξ_a F."""
        return self._odd_derivative(a, from_right=False)

    # ----- comparison and rendering -----
    def __eq__(self, other):
        if isinstance(other, GradedFunction):
            return self.sig == other.sig and self.terms == other.terms
        if isinstance(other, (int, Scalar, BasePolynomial)):
            return self == GradedFunction.function(self.sig, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.sig, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-(len(t[0][0]) + 2 * sum(t[0][1])), t[0][0], [-k for k in t[0][1]]))

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for (subset, beta), coef in self.sorted_terms():
            body = "*".join(
                part for part in ("*".join(f"xi{a}" for a in subset), render_monomial(beta, "p")) if part
            )
            pieces.append(render_coefficient(coef, body))
        return join_signed(pieces)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"GradedFunction({self.render()})"


def _as_polynomial(value, n: int) -> BasePolynomial:
    if isinstance(value, BasePolynomial):
        if value.n != n:
            raise DimensionError(f"Polynomial dimension {value.n} does not match {n}")
        return value
    return BasePolynomial.constant(Scalar.coerce(value), n)


def render_coefficient(coef: BasePolynomial, body: str) -> str:
    """`coef*body` with the polynomial folded into a single term when possible."""
    if len(coef.terms) == 1:
        (exp, scalar), = coef.terms.items()
        joined = "*".join(part for part in (render_monomial(exp), body) if part)
        return render_term(scalar, joined)
    if not body:
        return coef.render()
    return f"({coef.render()})*{body}"


# ===== Products and brackets =====
def gf_product(left: GradedFunction, right: GradedFunction) -> GradedFunction:
    """Graded-commutative product with ξ_a ξ_b = -ξ_b ξ_a."""
    left._check(right)
    terms: dict[TermKey, BasePolynomial] = {}
    for (a_set, beta), f in left.terms.items():
        for (b_set, gamma), g in right.terms.items():
            merged = merge_subsets(a_set, b_set)
            if merged is None:
                continue
            sign, subset = merged
            key = (subset, tuple(x + y for x, y in zip(beta, gamma)))
            value = f * g if sign > 0 else -(f * g)
            terms[key] = terms[key] + value if key in terms else value
    return GradedFunction(left.sig, terms)


def poisson(left: GradedFunction, right: GradedFunction) -> GradedFunction:
    """Degree -2 Poisson bracket of the canonical symplectic structure.

    {F, G} = Σ_i (∂_{p_i}F ∂_{x^i}G - ∂_{x^i}F ∂_{p_i}G) + Σ_ab g_ab (F∂←_a)(∂→_b G)
    """
    left._check(right)
    sig = left.sig
    result = GradedFunction.zero(sig)
    for i in range(1, sig.n + 1):
        dp_left, dx_left = left.p_partial(i), left.x_partial(i)
        if dp_left.is_zero() and dx_left.is_zero():
            continue
        result = result + dp_left * right.x_partial(i) - dx_left * right.p_partial(i)
    if sig.m:
        rights = {a: left.right_derivative(a) for a in range(1, sig.m + 1)}
        lefts = {b: right.left_derivative(b) for b in range(1, sig.m + 1)}
        for a in range(1, sig.m + 1):
            if rights[a].is_zero():
                continue
            for b in range(1, sig.m + 1):
                g_ab = sig.g(a, b)
                if g_ab.is_zero() or lefts[b].is_zero():
                    continue
                result = result + (rights[a] * lefts[b]).scale(g_ab)
    return result


def tau(symbol: GradedFunction) -> GradedFunction:
    """Conjugate-linear involution f ξ_A p^β -> conj(f) i^k (-1)^{k(k-1)/2} ξ_A p^β."""
    terms = {}
    for (subset, beta), coef in symbol.terms.items():
        k = len(subset)
        factor = Scalar.imag() ** k * _sign(k * (k - 1) // 2)
        terms[(subset, beta)] = coef.conj().scale(factor)
    return GradedFunction(symbol.sig, terms)


def wedge_metric(left: GradedFunction, right: GradedFunction) -> BasePolynomial:
    """Metric induced on ∧E: Σ f_A g_B det g[A, B] for p-free symbols."""
    if not (left.is_p_free() and right.is_p_free()):
        raise DomainError("Wedge metric needs p-free symbols")
    sig = left.sig
    total = BasePolynomial.zero(sig.n)
    for (a_set, _), f in left.terms.items():
        for (b_set, _), g in right.terms.items():
            if len(a_set) != len(b_set):
                continue
            minor = determinant([[sig.g(a, b) for b in b_set] for a in a_set]) if a_set else ONE
            if not minor.is_zero():
                total = total + (f * g).scale(minor)
    return total


def subsets(m: int, size: int | None = None) -> Iterable[Subset]:
    sizes = range(m + 1) if size is None else [size]
    for k in sizes:
        yield from combinations(range(1, m + 1), k)


def linear_symbol(sig: ModelSignature, coefficients: Sequence) -> GradedFunction:
    """Σ_a u^a ξ_a for a section u of E."""
    total = GradedFunction.zero(sig)
    for a, coef in enumerate(coefficients, start=1):
        total = total + GradedFunction.xi(sig, a) * coef
    return total


def linear_coefficients(symbol: GradedFunction) -> list[BasePolynomial]:
    """Inverse of linear_symbol; raises when other terms are present."""
    sig = symbol.sig
    coefficients = [BasePolynomial.zero(sig.n) for _ in range(sig.m)]
    zero_beta = (0,) * sig.n
    for (subset, beta), coef in symbol.terms.items():
        if len(subset) != 1 or beta != zero_beta:
            raise DomainError(f"Symbol {symbol} is not a section of E")
        coefficients[subset[0] - 1] = coef
    return coefficients



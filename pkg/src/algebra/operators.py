# src/algebra/operators.py
from __future__ import annotations

import logging
import math
from itertools import product as cartesian
from typing import Iterable, Sequence

from src.algebra.clifford import CliffordElement, WittFrame, _accumulate, cl_reverse, mul_monomials
from src.algebra.polynomials import (
    BasePolynomial,
    join_signed,
    multi_binomial,
    render_monomial,
    sub_multi_indices,
)
from src.algebra.scalars import ONE, SQRT2, Scalar
from src.algebra.symbols import Exponent, GradedFunction, ModelSignature, Subset, render_coefficient
from src.errors import DimensionError, DomainError, InputError

logger = logging.getLogger(__name__)

OpKey = tuple[Subset, Exponent]


# ===== Define the SpinorOperator class =====
class SpinorOperator:
    """Spinor differential operator in normal form Σ f(x) · c_A · ∂^β.

    The filtration order of a term is |A| + 2|β| and its parity is |A| mod 2.
    """

    __slots__ = ("sig", "terms")

    def __init__(self, sig: ModelSignature, terms: dict[OpKey, BasePolynomial] | None = None):
        self.sig = sig
        self.terms: dict[OpKey, BasePolynomial] = {}
        for (subset, beta), coef in (terms or {}).items():
            subset, beta = tuple(subset), tuple(beta)
            if list(subset) != sorted(set(subset)) or any(not 1 <= a <= sig.m for a in subset):
                raise InputError(f"Invalid Clifford index set {subset}")
            if len(beta) != sig.n:
                raise DimensionError(f"Derivative multi-index {beta} does not have length {sig.n}")
            if not isinstance(coef, BasePolynomial):
                coef = BasePolynomial.constant(coef, sig.n)
            if not coef.is_zero():
                self.terms[(subset, beta)] = coef

    # ----- constructors -----
    @classmethod
    def zero(cls, sig: ModelSignature) -> "SpinorOperator":
        return cls(sig)

    @classmethod
    def function(cls, sig: ModelSignature, value) -> "SpinorOperator":
        return cls(sig, {((), (0,) * sig.n): value})

    @classmethod
    def identity(cls, sig: ModelSignature) -> "SpinorOperator":
        return cls.function(sig, ONE)

    @classmethod
    def clifford(cls, u: CliffordElement) -> "SpinorOperator":
        zero_beta = (0,) * u.sig.n
        return cls(u.sig, {(subset, zero_beta): coef for subset, coef in u.terms.items()})

    @classmethod
    def generator(cls, sig: ModelSignature, a: int) -> "SpinorOperator":
        return cls.clifford(CliffordElement.generator(sig, a))

    @classmethod
    def derivative(cls, sig: ModelSignature, i: int) -> "SpinorOperator":
        if not 1 <= i <= sig.n:
            raise DimensionError(f"Derivative d{i} outside dimension {sig.n}")
        beta = [0] * sig.n
        beta[i - 1] = 1
        return cls(sig, {((), tuple(beta)): ONE})

    @classmethod
    def derivatives(cls, sig: ModelSignature, beta: Exponent) -> "SpinorOperator":
        return cls(sig, {((), tuple(beta)): ONE})

    # ----- structure -----
    def is_zero(self) -> bool:
        return not self.terms

    def scalar_part(self) -> BasePolynomial:
        return self.terms.get(((), (0,) * self.sig.n), BasePolynomial.zero(self.sig.n))

    def is_multiplication(self) -> bool:
        zero_beta = (0,) * self.sig.n
        return all(key == ((), zero_beta) for key in self.terms)

    def parity_decompose(self) -> dict[int, "SpinorOperator"]:
        parts: dict[int, dict] = {0: {}, 1: {}}
        for key, coef in self.terms.items():
            parts[len(key[0]) % 2][key] = coef
        return {p: SpinorOperator(self.sig, t) for p, t in parts.items()}

    def parity(self) -> int:
        parities = {len(s) % 2 for s, _ in self.terms}
        if len(parities) > 1:
            raise DomainError("Operator has mixed parity")
        return parities.pop() if parities else 0

    def top_order_part(self) -> "SpinorOperator":
        top = order(self)
        return SpinorOperator(self.sig, {k: c for k, c in self.terms.items() if _term_order(k) == top})

    def clifford_part(self) -> CliffordElement:
        """Zeroth-order-in-∂ part as a Clifford element."""
        zero_beta = (0,) * self.sig.n
        return CliffordElement(self.sig, {s: c for (s, b), c in self.terms.items() if b == zero_beta})

    # ----- arithmetic -----
    def _check(self, other: "SpinorOperator"):
        if other.sig != self.sig:
            raise DimensionError("Operators live on different signatures")

    def __add__(self, other):
        if not isinstance(other, SpinorOperator):
            try:
                other = SpinorOperator.function(self.sig, other)
            except InputError:
                return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            terms[key] = terms[key] + coef if key in terms else coef
        return SpinorOperator(self.sig, terms)

    __radd__ = __add__

    def __neg__(self):
        return SpinorOperator(self.sig, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Composition with operators, left multiplication by scalars."""
        if isinstance(other, SpinorOperator):
            return op_compose(self, other)
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        if isinstance(other, BasePolynomial):
            return op_compose(self, SpinorOperator.function(self.sig, other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        if isinstance(other, BasePolynomial):
            return SpinorOperator(self.sig, {k: other * c for k, c in self.terms.items()})
        return NotImplemented

    def scale(self, factor) -> "SpinorOperator":
        factor = Scalar.coerce(factor)
        return SpinorOperator(self.sig, {k: c.scale(factor) for k, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, SpinorOperator):
            return self.sig == other.sig and self.terms == other.terms
        if isinstance(other, (int, Scalar, BasePolynomial)):
            return self == SpinorOperator.function(self.sig, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.sig, frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms.items(), key=lambda t: (-_term_order(t[0]), t[0][0], [-k for k in t[0][1]]))
        pieces = []
        for (subset, beta), coef in ordered:
            body = "*".join(
                part for part in ("*".join(f"c{a}" for a in subset), render_monomial(beta, "d")) if part
            )
            pieces.append(render_coefficient(coef, body))
        return join_signed(pieces)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"SpinorOperator({self.render()})"


def _term_order(key: OpKey) -> int:
    return len(key[0]) + 2 * sum(key[1])


# ===== Operations =====
def op_compose(left: SpinorOperator, right: SpinorOperator) -> SpinorOperator:
    """left ∘ right, rewritten with [∂_i, f] = ∂_i f and [∂_i, c_a] = 0."""
    left._check(right)
    sig = left.sig
    terms: dict[OpKey, BasePolynomial] = {}
    for (a_set, beta), f in left.terms.items():
        for (b_set, gamma), g in right.terms.items():
            products = mul_monomials(sig, a_set, b_set)
            if not products:
                continue
            for delta in sub_multi_indices(beta):
                dg = g.multi_partial(delta)
                if dg.is_zero():
                    continue
                coef = (f * dg).scale(multi_binomial(beta, delta))
                derivative = tuple(b - d + c for b, d, c in zip(beta, delta, gamma))
                for subset, s in products:
                    _accumulate(terms, (subset, derivative), coef.scale(s))
    return SpinorOperator(sig, terms)


def op_commutator(left: SpinorOperator, right: SpinorOperator) -> SpinorOperator:
    """Graded commutator, extended bilinearly over the parity parts."""
    result = SpinorOperator.zero(left.sig)
    for p, a in left.parity_decompose().items():
        if a.is_zero():
            continue
        for q, b in right.parity_decompose().items():
            if b.is_zero():
                continue
            swapped = op_compose(b, a)
            result = result + op_compose(a, b) - (swapped if p * q % 2 == 0 else -swapped)
    return result


def order(operator: SpinorOperator) -> float:
    """Filtration order; -inf for the zero operator."""
    return max((_term_order(k) for k in operator.terms), default=-math.inf)


def principal_symbol(operator: SpinorOperator) -> GradedFunction:
    """σ_k(f c_A ∂^β) = f (√2)^{|A|} ξ_A p^β on the terms of top order k."""
    if operator.is_zero():
        raise DomainError("The zero operator has no principal symbol")
    top = order(operator)
    terms = {
        (subset, beta): coef.scale(SQRT2 ** len(subset))
        for (subset, beta), coef in operator.terms.items()
        if _term_order((subset, beta)) == top
    }
    return GradedFunction(operator.sig, terms)


def adjoint(operator: SpinorOperator) -> SpinorOperator:
    """Formal adjoint: f* = conj f, c_a* = c_a, ∂_i* = -∂_i, reversing products."""
    sig = operator.sig
    result = SpinorOperator.zero(sig)
    for (subset, beta), coef in operator.terms.items():
        reversed_clifford = SpinorOperator.clifford(cl_reverse(CliffordElement(sig, {subset: ONE})))
        term = op_compose(
            SpinorOperator.derivatives(sig, beta),
            op_compose(reversed_clifford, SpinorOperator.function(sig, coef.conj())),
        )
        result = result + (term if sum(beta) % 2 == 0 else -term)
    return result


def op_conjugate(operator: SpinorOperator) -> SpinorOperator:
    """Complex conjugation; c_a and ∂_i are real."""
    return SpinorOperator(operator.sig, {k: c.conj() for k, c in operator.terms.items()})


def apply(operator: SpinorOperator, section: Sequence[BasePolynomial], frame: WittFrame) -> list[BasePolynomial]:
    """Action on a spinor-valued polynomial section through the Witt representation."""
    if operator.sig != frame.sig:
        raise DimensionError("Witt frame belongs to another signature")
    if len(section) != frame.dim:
        raise DimensionError(f"Spinor section must have {frame.dim} components")
    n = operator.sig.n
    result = [BasePolynomial.zero(n) for _ in range(frame.dim)]
    for (subset, beta), coef in operator.terms.items():
        derived = [s.multi_partial(beta) for s in section]
        matrix = frame.monomial_matrix(subset)
        for i in range(frame.dim):
            acc = BasePolynomial.zero(n)
            for j in range(frame.dim):
                entry = matrix[i, j]
                if not entry.is_zero() and not derived[j].is_zero():
                    acc = acc + derived[j].scale(entry)
            if not acc.is_zero():
                result[i] = result[i] + coef * acc
    return result


def exponents_up_to(n: int, degree: int) -> Iterable[Exponent]:
    for exp in cartesian(range(degree + 1), repeat=n):
        if sum(exp) <= degree:
            yield exp


def operators_agree(first: SpinorOperator, second: SpinorOperator, frame: WittFrame) -> bool:
    """Compare two operators by their action on x^α·e_S, |α| ≤ max derivative order."""
    bound = max((sum(b) for _, b in list(first.terms) + list(second.terms)), default=0)
    n = first.sig.n
    for alpha in exponents_up_to(n, bound):
        monomial = BasePolynomial.monomial(alpha) if n else BasePolynomial.one(0)
        for index in range(frame.dim):
            section = [BasePolynomial.zero(n) for _ in range(frame.dim)]
            section[index] = monomial
            if apply(first, section, frame) != apply(second, section, frame):
                return False
    return True

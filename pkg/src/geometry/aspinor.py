# src/geometry/aspinor.py
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Mapping

from src.algebra.operators import SpinorOperator
from src.algebra.polynomials import (
    BasePolynomial,
    join_signed,
    multi_binomial,
    render_monomial,
    sub_multi_indices,
)
from src.algebra.scalars import ONE, Scalar
from src.algebra.symbols import ModelSignature, Subset, merge_subsets, render_coefficient, subsets
from src.errors import DimensionError, DomainError, InputError, UnsupportedError
from src.geometry.courant import duality_metric

logger = logging.getLogger(__name__)

Exponent = tuple[int, ...]
AKey = tuple[Subset, Subset, Exponent]


def _accumulate(target: dict, key, value):
    total = target[key] + value if key in target else value
    if total.is_zero():
        target.pop(key, None)
    else:
        target[key] = total


def _check_subset(subset: Subset, r: int) -> Subset:
    subset = tuple(subset)
    if list(subset) != sorted(set(subset)) or any(not 1 <= a <= r for a in subset):
        raise InputError(f"Invalid odd index set {subset} for rank {r}")
    return subset


# ===== Define the Form class =====
class Form:
    """Element of O(A[1]): Σ_B f_B(x) η^B with η^B the increasing wedge product."""

    __slots__ = ("n", "r", "terms")

    def __init__(self, n: int, r: int, terms: Mapping[Subset, BasePolynomial] | None = None):
        self.n = n
        self.r = r
        self.terms: dict[Subset, BasePolynomial] = {}
        for subset, coef in (terms or {}).items():
            subset = _check_subset(subset, r)
            if not isinstance(coef, BasePolynomial):
                coef = BasePolynomial.constant(coef, n)
            elif coef.n != n:
                raise DimensionError(f"Coefficient dimension {coef.n} does not match {n}")
            if not coef.is_zero():
                self.terms[subset] = coef

    @classmethod
    def zero(cls, n: int, r: int) -> "Form":
        return cls(n, r)

    @classmethod
    def function(cls, n: int, r: int, value) -> "Form":
        return cls(n, r, {(): value})

    @classmethod
    def eta(cls, n: int, r: int, a: int) -> "Form":
        return cls(n, r, {(a,): ONE})

    @classmethod
    def linear(cls, n: int, r: int, coefficients) -> "Form":
        """Σ_a v_a η^a."""
        return cls(n, r, {(a,): c for a, c in enumerate(coefficients, start=1)})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "Form"):
        if (other.n, other.r) != (self.n, self.r):
            raise DimensionError("Forms live on different algebroids")

    def __add__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for subset, coef in other.terms.items():
            terms[subset] = terms[subset] + coef if subset in terms else coef
        return Form(self.n, self.r, terms)

    def __neg__(self):
        return Form(self.n, self.r, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Wedge product, or scaling by a polynomial or scalar."""
        if isinstance(other, Form):
            self._check(other)
            terms: dict[Subset, BasePolynomial] = {}
            for b_set, f in self.terms.items():
                for c_set, g in other.terms.items():
                    merged = merge_subsets(b_set, c_set)
                    if merged is None:
                        continue
                    sign, subset = merged
                    _accumulate(terms, subset, f * g if sign > 0 else -(f * g))
            return Form(self.n, self.r, terms)
        if isinstance(other, (int, Scalar, BasePolynomial)):
            return Form(self.n, self.r, {s: c * other for s, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar, BasePolynomial)):
            return self.__mul__(other)
        return NotImplemented

    def partial_x(self, i: int) -> "Form":
        return Form(self.n, self.r, {s: c.partial(i) for s, c in self.terms.items()})

    def partial_eta(self, a: int) -> "Form":
        """Left derivative ∂/∂η^a."""
        terms = {}
        for subset, coef in self.terms.items():
            if a in subset:
                j = subset.index(a)
                terms[subset[:j] + subset[j + 1:]] = coef if j % 2 == 0 else -coef
        return Form(self.n, self.r, terms)

    def degree_part(self, k: int) -> "Form":
        return Form(self.n, self.r, {s: c for s, c in self.terms.items() if len(s) == k})

    def function_part(self) -> BasePolynomial:
        return self.terms.get((), BasePolynomial.zero(self.n))

    def __eq__(self, other):
        if isinstance(other, Form):
            return (self.n, self.r) == (other.n, other.r) and self.terms == other.terms
        if isinstance(other, (int, Scalar, BasePolynomial)):
            return self == Form.function(self.n, self.r, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.r, frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms.items(), key=lambda t: (-len(t[0]), t[0]))
        return join_signed([render_coefficient(c, "*".join(f"eta{a}" for a in s)) for s, c in ordered])

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Form({self.render()})"


# ===== Normal ordering of ∂_η past η =====
@lru_cache(maxsize=None)
def _deta_past_eta(derivs: Subset, wedge: Subset) -> tuple[tuple[int, Subset, Subset], ...]:
    """∂^A ∘ η^C = Σ sign · η^{C'} ∘ ∂^{A'} with ∂^A = ∂_{a1}∘...∘∂_{ak}."""
    if not derivs:
        return ((1, wedge, ()),)
    head, a = derivs[:-1], derivs[-1]
    # ∂_a ∘ η^C = (∂_a η^C) + (-1)^{|C|} η^C ∘ ∂_a
    moves = []
    if a in wedge:
        j = wedge.index(a)
        moves.append(((-1) ** j, wedge[:j] + wedge[j + 1:], ()))
    moves.append(((-1) ** len(wedge), wedge, (a,)))
    result: dict[tuple[Subset, Subset], int] = {}
    for s1, c1, tail in moves:
        for s2, c2, a2 in _deta_past_eta(head, c1):
            merged = merge_subsets(a2, tail)
            if merged is None:
                continue
            s3, a3 = merged
            result[(c2, a3)] = result.get((c2, a3), 0) + s1 * s2 * s3
    return tuple(sorted((s, c, d) for (c, d), s in result.items() if s))


def _deta_sign(subset: Subset) -> int:
    """∂^B applied to η^B."""
    k = len(subset)
    return -1 if (k * (k - 1) // 2) % 2 else 1


# ===== Define the ASpinorOperator class =====
class ASpinorOperator:
    """Differential operator on O(A[1]) in normal form Σ f(x) η^B ∂_η^A ∂_x^β.

    Half-Berezinian sections are stored as bare forms relative to the
    reference section (∧dx ⊗ ∏ζ_a)^{1/2}.
    """

    __slots__ = ("n", "r", "terms")

    def __init__(self, n: int, r: int, terms: Mapping[AKey, BasePolynomial] | None = None):
        self.n = n
        self.r = r
        self.terms: dict[AKey, BasePolynomial] = {}
        for (wedge, derivs, beta), coef in (terms or {}).items():
            wedge, derivs, beta = _check_subset(wedge, r), _check_subset(derivs, r), tuple(beta)
            if len(beta) != n:
                raise DimensionError(f"Derivative multi-index {beta} does not have length {n}")
            if not isinstance(coef, BasePolynomial):
                coef = BasePolynomial.constant(coef, n)
            if not coef.is_zero():
                self.terms[(wedge, derivs, beta)] = coef

    # ----- constructors -----
    @classmethod
    def zero(cls, n: int, r: int) -> "ASpinorOperator":
        return cls(n, r)

    @classmethod
    def function(cls, n: int, r: int, value) -> "ASpinorOperator":
        return cls(n, r, {((), (), (0,) * n): value})

    @classmethod
    def identity(cls, n: int, r: int) -> "ASpinorOperator":
        return cls.function(n, r, ONE)

    @classmethod
    def multiplication(cls, form: Form) -> "ASpinorOperator":
        zero = (0,) * form.n
        return cls(form.n, form.r, {(s, (), zero): c for s, c in form.terms.items()})

    @classmethod
    def eta(cls, n: int, r: int, a: int) -> "ASpinorOperator":
        return cls.multiplication(Form.eta(n, r, a))

    @classmethod
    def d_eta(cls, n: int, r: int, a: int) -> "ASpinorOperator":
        return cls(n, r, {((), (a,), (0,) * n): ONE})

    @classmethod
    def d_x(cls, n: int, r: int, i: int) -> "ASpinorOperator":
        if not 1 <= i <= n:
            raise DimensionError(f"Derivative d{i} outside dimension {n}")
        beta = [0] * n
        beta[i - 1] = 1
        return cls(n, r, {((), (), tuple(beta)): ONE})

    # ----- structure -----
    def is_zero(self) -> bool:
        return not self.terms

    def is_base_function(self) -> bool:
        zero = (0,) * self.n
        return all(key == ((), (), zero) for key in self.terms)

    def scalar_part(self) -> BasePolynomial:
        return self.terms.get(((), (), (0,) * self.n), BasePolynomial.zero(self.n))

    def parity_decompose(self) -> dict[int, "ASpinorOperator"]:
        parts: dict[int, dict] = {0: {}, 1: {}}
        for key, coef in self.terms.items():
            parts[(len(key[0]) + len(key[1])) % 2][key] = coef
        return {p: ASpinorOperator(self.n, self.r, t) for p, t in parts.items()}

    # ----- arithmetic -----
    def _check(self, other: "ASpinorOperator"):
        if (other.n, other.r) != (self.n, self.r):
            raise DimensionError("Operators live on different algebroids")

    def __add__(self, other):
        if not isinstance(other, ASpinorOperator):
            try:
                other = ASpinorOperator.function(self.n, self.r, other)
            except InputError:
                return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            terms[key] = terms[key] + coef if key in terms else coef
        return ASpinorOperator(self.n, self.r, terms)

    __radd__ = __add__

    def __neg__(self):
        return ASpinorOperator(self.n, self.r, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ASpinorOperator):
            return self.compose(other)
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        if isinstance(other, BasePolynomial):
            return ASpinorOperator(self.n, self.r, {k: other * c for k, c in self.terms.items()})
        return NotImplemented

    def scale(self, factor) -> "ASpinorOperator":
        factor = Scalar.coerce(factor)
        return ASpinorOperator(self.n, self.r, {k: c.scale(factor) for k, c in self.terms.items()})

    def compose(self, other: "ASpinorOperator") -> "ASpinorOperator":
        self._check(other)
        terms: dict[AKey, BasePolynomial] = {}
        for (b_set, a_set, beta), f in self.terms.items():
            for (c_set, d_set, gamma), g in other.terms.items():
                reordered = _deta_past_eta(a_set, c_set)
                for delta in sub_multi_indices(beta):
                    dg = g.multi_partial(delta)
                    if dg.is_zero():
                        continue
                    coef = (f * dg).scale(multi_binomial(beta, delta))
                    derivative = tuple(b - d + c for b, d, c in zip(beta, delta, gamma))
                    for s1, c2, a2 in reordered:
                        left = merge_subsets(b_set, c2)
                        right = merge_subsets(a2, d_set)
                        if left is None or right is None:
                            continue
                        sign = s1 * left[0] * right[0]
                        _accumulate(terms, (left[1], right[1], derivative), coef if sign > 0 else -coef)
        return ASpinorOperator(self.n, self.r, terms)

    def commutator(self, other: "ASpinorOperator") -> "ASpinorOperator":
        result = ASpinorOperator.zero(self.n, self.r)
        for p, a in self.parity_decompose().items():
            for q, b in other.parity_decompose().items():
                if a.is_zero() or b.is_zero():
                    continue
                swapped = b.compose(a)
                result = result + a.compose(b) - (swapped if p * q % 2 == 0 else -swapped)
        return result

    def apply(self, form: Form) -> Form:
        if (form.n, form.r) != (self.n, self.r):
            raise DimensionError("Form lives on another algebroid")
        terms: dict[Subset, BasePolynomial] = {}
        for (b_set, a_set, beta), f in self.terms.items():
            for c_set, g in form.terms.items():
                dg = g.multi_partial(beta)
                if dg.is_zero():
                    continue
                for sign, c2, a2 in _deta_past_eta(a_set, c_set):
                    if a2:
                        continue
                    merged = merge_subsets(b_set, c2)
                    if merged is None:
                        continue
                    value = f * dg
                    _accumulate(terms, merged[1], value if sign * merged[0] > 0 else -value)
        return Form(self.n, self.r, terms)

    # ----- conversions -----
    @classmethod
    def from_spinor_operator(cls, operator: SpinorOperator, r: int) -> "ASpinorOperator":
        """Image under c_a -> ∂/∂η^a, c_{r+a} -> η^a∧ on a double with ½-duality metric."""
        sig = operator.sig
        if sig.m != 2 * r:
            raise DimensionError(f"Operator rank {sig.m} is not twice {r}")
        if sig != half_duality_signature(sig.n, r):
            raise UnsupportedError("Splittable identification needs the half-duality metric")
        n = sig.n
        result = cls.zero(n, r)
        for (subset, beta), coef in operator.terms.items():
            image = cls.identity(n, r)
            for a in subset:
                image = image.compose(cls.d_eta(n, r, a) if a <= r else cls.eta(n, r, a - r))
            image = image.compose(cls(n, r, {((), (), beta): ONE}))
            result = result + coef * image
        return result

    @classmethod
    def from_basis_action(cls, n: int, r: int, action: Callable[[Form], Form]) -> "ASpinorOperator":
        """Normal form of a C∞(M)-linear operator given by its action on the monomials η^B."""
        result = cls.zero(n, r)
        for subset in subsets(r):
            basis = Form(n, r, {subset: ONE})
            residual = action(basis) - result.apply(basis)
            if residual.is_zero():
                continue
            sign = _deta_sign(subset)
            zero = (0,) * n
            for wedge, coef in residual.terms.items():
                result = result + cls(n, r, {(wedge, subset, zero): coef if sign > 0 else -coef})
        return result

    # ----- comparison and rendering -----
    def __eq__(self, other):
        if isinstance(other, ASpinorOperator):
            return (self.n, self.r) == (other.n, other.r) and self.terms == other.terms
        if isinstance(other, (int, Scalar, BasePolynomial)):
            return self == ASpinorOperator.function(self.n, self.r, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.r, frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(
            self.terms.items(), key=lambda t: (-(len(t[0][0]) + len(t[0][1]) + 2 * sum(t[0][2])), t[0][0], t[0][1])
        )
        pieces = []
        for (wedge, derivs, beta), coef in ordered:
            parts = [
                "*".join(f"eta{a}" for a in wedge),
                "*".join(f"de{a}" for a in derivs),
                render_monomial(beta, "d"),
            ]
            pieces.append(render_coefficient(coef, "*".join(p for p in parts if p)))
        return join_signed(pieces)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"ASpinorOperator({self.render()})"


@lru_cache(maxsize=None)
def half_duality_signature(n: int, r: int) -> ModelSignature:
    """Double of a rank-r algebroid with g(ζ_a, η^b) = ½ δ_a^b, frame order (ζ_1..ζ_r, η^1..η^r)."""
    return ModelSignature(n, 2 * r, duality_metric(r))


def square_function(operator: ASpinorOperator) -> BasePolynomial:
    """Base function W∘W, or DomainError with the residual when it is not one."""
    square = operator.compose(operator)
    if not square.is_base_function():
        raise DomainError(f"Square is not a base function: {square.render()}")
    return square.scalar_part()

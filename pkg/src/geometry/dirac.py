# src/geometry/dirac.py
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from src.algebra.clifford import chevalley
from src.algebra.operators import SpinorOperator, op_commutator, op_compose, order
from src.algebra.polynomials import BasePolynomial
from src.algebra.scalars import Scalar
from src.algebra.symbols import GradedFunction, ModelSignature, wedge_metric
from src.algebra.weyl import quantize
from src.errors import DomainError, UnsupportedError
from src.geometry.courant import (
    THETA_TORSION_SCALE,
    BracketKey,
    CourantData,
    Section,
    torsion,
)

logger = logging.getLogger(__name__)

INV_SQRT2 = Scalar(0, Fraction(1, 2))


def _require_even(sig: ModelSignature):
    if sig.m % 2:
        raise UnsupportedError(f"Spinor operators need even rank, got m = {sig.m}")


def dirac_weyl(theta: GradedFunction) -> SpinorOperator:
    """D = W(Θ), the skew-symmetric Dirac generating operator."""
    _require_even(theta.sig)
    return quantize(theta)


def anchor_divergence(K: CourantData) -> Section:
    """Coordinate divergence of the anchor raised by g: V^b = Σ ∂_i ρ^i_a g^{ab}.

    Depends on the frame; only the combination in invariant_fE does not.
    """
    sig, n, m = K.signature, K.n, K.m
    trace = []
    for a in range(1, m + 1):
        total = BasePolynomial.zero(n)
        for i in range(1, n + 1):
            total = total + K.rho(a, i).partial(i)
        trace.append(total)
    return sig.raise_index(trace)


def _clifford_vector(sig: ModelSignature, coefficients: Sequence[BasePolynomial]) -> SpinorOperator:
    zero = (0,) * sig.n
    return SpinorOperator(sig, {((a,), zero): c for a, c in enumerate(coefficients, start=1)})


def dirac_explicit(K: CourantData) -> SpinorOperator:
    """(1/√2)[Σ g^{ab} ρ^i_b c_a ∂_i + ½γ(λ_C C) + ½γ(V)]."""
    sig, n, m = K.signature, K.n, K.m
    _require_even(sig)
    half = Scalar(Fraction(1, 2))
    result = SpinorOperator.zero(sig)
    for i in range(1, n + 1):
        coefficients = []
        for a in range(1, m + 1):
            total = BasePolynomial.zero(n)
            for b in range(1, m + 1):
                if not sig.g_inv(a, b).is_zero():
                    total = total + K.rho(b, i).scale(sig.g_inv(a, b))
            coefficients.append(total)
        result = result + op_compose(_clifford_vector(sig, coefficients), SpinorOperator.derivative(sig, i))
    cartan = SpinorOperator.clifford(chevalley(torsion(K).scale(THETA_TORSION_SCALE)))
    result = result + cartan.scale(half) + _clifford_vector(sig, anchor_divergence(K)).scale(half)
    return result.scale(INV_SQRT2)


def derived_commutator(D: SpinorOperator) -> CourantData:
    """Anchor [[D, c_a], x^i]/√2 and bracket coefficients of [[D, c_a], c_b]/√2."""
    sig, n, m = D.sig, D.sig.n, D.sig.m
    if D.is_zero():
        raise DomainError("The zero operator generates no structure")
    if D.parity() != 1 or order(D) != 3:
        raise DomainError(f"Generating operator must be odd of order 3, got order {order(D)}")
    anchor: List[List[BasePolynomial]] = []
    bracket: Dict[BracketKey, BasePolynomial] = {}
    zero = (0,) * n
    for a in range(1, m + 1):
        first = op_commutator(D, SpinorOperator.generator(sig, a))
        row = []
        for i in range(1, n + 1):
            value = op_commutator(first, SpinorOperator.function(sig, BasePolynomial.variable(i, n)))
            if not value.is_multiplication():
                raise DomainError(f"[[D, c{a}], x{i}] is not a function: {value.render()}")
            row.append(value.scalar_part().scale(INV_SQRT2))
        anchor.append(row)
        for b in range(1, m + 1):
            second = op_commutator(first, SpinorOperator.generator(sig, b))
            for (subset, beta), coef in second.terms.items():
                if len(subset) != 1 or beta != zero:
                    raise DomainError(f"[[D, c{a}], c{b}] is not a section: {second.render()}")
                bracket[(a, b, subset[0])] = coef.scale(INV_SQRT2)
    return CourantData.build(sig, anchor, bracket)


def commutator_bracket(D: SpinorOperator, u: Sequence[BasePolynomial], v: Sequence[BasePolynomial]) -> Section:
    """Linear coefficients of [[D, γ(u)], γ(v)]/√2 for polynomial sections u, v."""
    sig = D.sig
    zero = (0,) * sig.n
    result = op_commutator(op_commutator(D, _clifford_vector(sig, u)), _clifford_vector(sig, v))
    section = [BasePolynomial.zero(sig.n) for _ in range(sig.m)]
    for (subset, beta), coef in result.terms.items():
        if len(subset) != 1 or beta != zero:
            raise DomainError(f"Commutator derived bracket is not a section: {result.render()}")
        section[subset[0] - 1] = coef.scale(INV_SQRT2)
    return section


def dirac_square(D: SpinorOperator) -> Tuple[SpinorOperator, float]:
    """D∘D and its filtration order."""
    square = op_compose(D, D)
    return square, order(square)


def square_scalar(D: SpinorOperator) -> BasePolynomial:
    """The function D∘D, or DomainError with the residual when D² is not one."""
    square, degree = dirac_square(D)
    if not square.is_multiplication():
        raise DomainError(f"D∘D has order {degree} and is not a function: {square.render()}")
    return square.scalar_part()


def invariant_fE(K: CourantData) -> BasePolynomial:
    """f_E = g(C, C) - g(V, V) - 2 Div V with V the raised anchor divergence."""
    sig, n, m = K.signature, K.n, K.m
    cartan = torsion(K)
    V = anchor_divergence(K)
    divergence = BasePolynomial.zero(n)
    for a in range(1, m + 1):
        for i in range(1, n + 1):
            if not K.rho(a, i).is_zero():
                divergence = divergence + K.rho(a, i) * V[a - 1].partial(i)
    value = wedge_metric(cartan, cartan) - sig.pairing(V, V) - divergence * 2
    logger.debug("f_E = %s", value.render())
    return value


def fE_from_square(D: SpinorOperator) -> BasePolynomial:
    """-8 times the scalar of D∘D."""
    return square_scalar(D).scale(-8)

# tests/test_operators.py
import math

import numpy as np
import pytest

from src.algebra.clifford import default_witt_frame
from src.algebra.operators import (
    SpinorOperator,
    adjoint,
    apply,
    op_commutator,
    op_conjugate,
    operators_agree,
    order,
    principal_symbol,
)
from src.algebra.polynomials import BasePolynomial, random_polynomial
from src.algebra.scalars import I, SQRT2
from src.algebra.symbols import GradedFunction, ModelSignature, gf_product, poisson
from src.errors import DimensionError, DomainError


@pytest.fixture
def sig():
    return ModelSignature(2, 2)


@pytest.fixture
def gens(sig):
    x1 = SpinorOperator.function(sig, BasePolynomial.variable(1, 2))
    x2 = SpinorOperator.function(sig, BasePolynomial.variable(2, 2))
    c1, c2 = SpinorOperator.generator(sig, 1), SpinorOperator.generator(sig, 2)
    d1, d2 = SpinorOperator.derivative(sig, 1), SpinorOperator.derivative(sig, 2)
    return x1, x2, c1, c2, d1, d2


def test_canonical_commutators(sig, gens):
    x1, x2, c1, c2, d1, d2 = gens
    assert op_commutator(d1, x1) == SpinorOperator.identity(sig)
    assert op_commutator(d1, x2).is_zero()
    assert op_commutator(d1, c1).is_zero()
    assert op_commutator(c1, c1) == 2
    assert op_commutator(c1, c2).is_zero()
    assert d1 * x1 == x1 * d1 + 1


def test_order_and_principal_symbol(sig, gens):
    x1, _, c1, c2, d1, _ = gens
    assert principal_symbol(c1) == GradedFunction.xi(sig, 1).scale(SQRT2)
    assert principal_symbol(x1 * d1 + c1) == GradedFunction.x(sig, 1) * GradedFunction.p(sig, 1)
    assert principal_symbol(c1 * c2) == (GradedFunction.xi(sig, 1) * GradedFunction.xi(sig, 2)).scale(2)
    assert order(c1 * d1) == 3
    assert order(SpinorOperator.zero(sig)) == -math.inf
    with pytest.raises(DomainError):
        principal_symbol(SpinorOperator.zero(sig))


def test_adjoint(sig, gens):
    x1, x2, c1, c2, d1, d2 = gens
    assert adjoint(d1) == -d1
    assert adjoint(c1) == c1
    assert adjoint(c1 * c2) == c2 * c1
    assert adjoint(x1 * d1) == -(x1 * d1) - 1
    assert adjoint(x1.scale(I)) == x1.scale(-I)
    T = x1 * c1 * d2 + (c1 * c2).scale(I) + x2 * x2 * d1 * d1 + c2
    assert adjoint(adjoint(T)) == T
    # (ST)* = T* S*
    S = x2 * c2 * d1 + c1
    assert adjoint(S * T) == adjoint(T) * adjoint(S)
    assert op_conjugate(T.scale(I)) == op_conjugate(T).scale(-I)


def test_parity(sig, gens):
    x1, _, c1, c2, d1, _ = gens
    assert (c1 * d1).parity() == 1
    assert (c1 * c2 + x1).parity() == 0
    with pytest.raises(DomainError):
        (c1 + x1).parity()
    with pytest.raises(DimensionError):
        SpinorOperator(sig, {((1,), (0,)): 1})


def test_witt_action(sig, gens):
    x1, _, c1, c2, d1, _ = gens
    frame = default_witt_frame(sig)
    one, zero = BasePolynomial.one(2), BasePolynomial.zero(2)
    X1 = BasePolynomial.variable(1, 2)
    assert apply(d1, [X1, zero], frame) == [one, zero]
    assert apply(x1, [one, X1], frame) == [X1, X1 * X1]
    # c1 c1 = g11 on every spinor
    assert apply(c1 * c1, [X1, one], frame) == [X1, one]
    with pytest.raises(DimensionError):
        apply(d1, [X1], frame)


def test_operators_agree(sig, gens):
    x1, _, c1, c2, d1, _ = gens
    frame = default_witt_frame(sig)
    assert operators_agree(c1 * c2 + c2 * c1, SpinorOperator.zero(sig), frame)
    assert operators_agree(d1 * x1, x1 * d1 + 1, frame)
    assert not operators_agree(c1, c2, frame)
    assert not operators_agree(x1 * d1, d1 * x1, frame)


def _random_operator(sig, rng, k: int) -> SpinorOperator:
    """Order-k operator whose terms all have order k, so its parity is k mod 2."""
    total = SpinorOperator.zero(sig)
    for _ in range(int(rng.integers(1, 4))):
        momenta = int(rng.integers(max(0, -(-(k - sig.m) // 2)), k // 2 + 1))
        subset = tuple(sorted(int(a) for a in rng.choice(np.arange(1, sig.m + 1), size=k - 2 * momenta, replace=False)))
        beta = [0] * sig.n
        for _ in range(momenta):
            beta[int(rng.integers(0, sig.n))] += 1
        coef = random_polynomial(sig.n, rng, max_degree=2, max_terms=2)
        total = total + SpinorOperator(sig, {(subset, tuple(beta)): coef})
    return total


def _random_pair(sig, rng):
    while True:
        A = _random_operator(sig, rng, int(rng.integers(1, 4)))
        B = _random_operator(sig, rng, int(rng.integers(1, 4)))
        if not A.is_zero() and not B.is_zero():
            return A, B


def test_filtration_closure(mixed_signature, rng):
    for _ in range(200):
        A, B = _random_pair(mixed_signature, rng)
        k, l = order(A), order(B)
        assert order(A * B) <= k + l
        assert order(op_commutator(A, B)) <= k + l - 2


@pytest.mark.slow
def test_symbol_morphism(mixed_signature, rng):
    checked = 0
    for _ in range(100):
        A, B = _random_pair(mixed_signature, rng)
        k, l = order(A), order(B)
        product = A * B
        if order(product) == k + l:
            assert principal_symbol(product) == gf_product(principal_symbol(A), principal_symbol(B))
            checked += 1
        bracket = op_commutator(A, B)
        if order(bracket) == k + l - 2:
            assert principal_symbol(bracket) == poisson(principal_symbol(A), principal_symbol(B))
            checked += 1
    assert checked > 0

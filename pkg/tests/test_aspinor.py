# tests/test_aspinor.py
import pytest

from src.algebra.operators import SpinorOperator
from src.algebra.polynomials import BasePolynomial
from src.algebra.symbols import ModelSignature
from src.errors import DimensionError, DomainError, UnsupportedError
from src.geometry.aspinor import ASpinorOperator, Form, half_duality_signature, square_function


def test_form_wedge():
    eta1, eta2 = Form.eta(1, 2, 1), Form.eta(1, 2, 2)
    assert eta1 * eta2 == -(eta2 * eta1)
    assert (eta1 * eta1).is_zero()
    x1 = BasePolynomial.variable(1, 1)
    assert (eta1 * x1).partial_x(1) == eta1
    assert (eta1 * eta2).partial_eta(2) == -eta1
    assert (eta1 * eta2 + Form.function(1, 2, x1)).degree_part(2) == eta1 * eta2


def test_canonical_relations():
    n, r = 1, 2
    eta1, de1 = ASpinorOperator.eta(n, r, 1), ASpinorOperator.d_eta(n, r, 1)
    de2 = ASpinorOperator.d_eta(n, r, 2)
    x1 = ASpinorOperator.function(n, r, BasePolynomial.variable(1, n))
    assert de1.compose(eta1) + eta1.compose(de1) == 1
    assert de1.commutator(eta1) == 1
    assert de1.commutator(de2).is_zero()
    assert ASpinorOperator.d_x(n, r, 1).commutator(x1) == 1


def test_apply():
    n, r = 1, 2
    x1 = BasePolynomial.variable(1, n)
    eta12 = Form.eta(n, r, 1) * Form.eta(n, r, 2)
    assert ASpinorOperator.d_eta(n, r, 1).apply(eta12) == Form.eta(n, r, 2)
    assert ASpinorOperator.d_eta(n, r, 2).apply(eta12) == -Form.eta(n, r, 1)
    assert ASpinorOperator.eta(n, r, 2).apply(Form.eta(n, r, 1)) == eta12
    assert ASpinorOperator.d_x(n, r, 1).apply(Form.eta(n, r, 1) * x1) == Form.eta(n, r, 1)


def test_from_spinor_operator():
    n, r = 1, 2
    sig = half_duality_signature(n, r)
    c = [SpinorOperator.generator(sig, a) for a in range(1, 2 * r + 1)]
    assert ASpinorOperator.from_spinor_operator(c[0], r) == ASpinorOperator.d_eta(n, r, 1)
    assert ASpinorOperator.from_spinor_operator(c[2], r) == ASpinorOperator.eta(n, r, 1)
    # composition is respected, including the reordering c3 c1 = 1 - c1 c3
    image = ASpinorOperator.from_spinor_operator(c[2] * c[0], r)
    assert image == ASpinorOperator.eta(n, r, 1).compose(ASpinorOperator.d_eta(n, r, 1))
    d1 = SpinorOperator.derivative(sig, 1)
    assert ASpinorOperator.from_spinor_operator(c[1] * d1, r) == ASpinorOperator.d_eta(n, r, 2).compose(
        ASpinorOperator.d_x(n, r, 1)
    )


def test_from_spinor_operator_needs_the_half_duality_metric():
    with pytest.raises(UnsupportedError):
        ASpinorOperator.from_spinor_operator(SpinorOperator.identity(ModelSignature(0, 2)), 1)
    with pytest.raises(DimensionError):
        ASpinorOperator.from_spinor_operator(SpinorOperator.identity(ModelSignature(0, 2)), 2)


def test_from_basis_action():
    n, r = 0, 2
    de1, de2 = ASpinorOperator.d_eta(n, r, 1), ASpinorOperator.d_eta(n, r, 2)
    eta1, eta2 = ASpinorOperator.eta(n, r, 1), ASpinorOperator.eta(n, r, 2)
    for op in (de1, de1.compose(de2), eta1.compose(de2) + eta2, ASpinorOperator.identity(n, r).scale(3)):
        assert ASpinorOperator.from_basis_action(n, r, op.apply) == op


def test_square_function():
    n, r = 1, 1
    odd = ASpinorOperator.d_eta(n, r, 1) + ASpinorOperator.eta(n, r, 1)
    assert square_function(odd) == 1
    with pytest.raises(DomainError):
        square_function(ASpinorOperator.d_x(n, r, 1))

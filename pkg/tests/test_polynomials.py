# tests/test_polynomials.py
from fractions import Fraction

import pytest

from src.algebra.polynomials import BasePolynomial, random_polynomial
from src.algebra.scalars import I, SQRT2, Scalar
from src.errors import DimensionError, InputError


@pytest.fixture
def xs():
    return BasePolynomial.variable(1, 2), BasePolynomial.variable(2, 2)


def test_ring_operations(xs):
    x1, x2 = xs
    f = (x1 + x2) ** 2
    assert f == x1 * x1 + 2 * x1 * x2 + x2 * x2
    assert f - f == 0
    assert (x1 * SQRT2) * (x1 * SQRT2) == 2 * x1**2
    assert (x1 + 1).degree() == 1
    assert BasePolynomial.zero(2).degree() == -1


def test_partial_derivatives(xs):
    x1, x2 = xs
    f = x1**3 * x2 + Scalar(Fraction(1, 2)) * x2**2
    assert f.partial(1) == 3 * x1**2 * x2
    assert f.partial(2) == x1**3 + x2
    assert f.partial(1, 3) == 6 * x2
    assert f.multi_partial((1, 1)) == 3 * x1**2


def test_evaluate_and_conjugate(xs):
    x1, x2 = xs
    f = x1 * I + x2
    assert f.evaluate([1, 2]) == Scalar(2, 0, 1)
    assert f.conj() == x2 - x1 * I


def test_dimension_errors(xs):
    x1, _ = xs
    with pytest.raises(InputError):
        BasePolynomial.variable(3, 2)
    with pytest.raises(DimensionError):
        x1 + BasePolynomial.variable(1, 3)
    with pytest.raises(InputError):
        x1 ** -1


def test_render(xs):
    x1, x2 = xs
    assert (x1**2 + Scalar(Fraction(3, 2)) * x2).render() == "x1^2 + 3/2*x2"
    assert (x1 - 1).render() == "x1 - 1"
    assert (x1 * Scalar(1, 1)).render() == "(1 + sqrt2)*x1"
    assert BasePolynomial.zero(2).render() == "0"


def test_random_polynomials_are_reproducible(rng):
    import numpy as np

    first = [random_polynomial(3, np.random.default_rng(7)) for _ in range(5)]
    second = [random_polynomial(3, np.random.default_rng(7)) for _ in range(5)]
    assert first == second
    assert all(p.degree() <= 2 for p in (random_polynomial(3, rng) for _ in range(20)))


def test_partials_commute_on_random_polynomials(rng):
    for _ in range(100):
        f = random_polynomial(3, rng, max_degree=4, max_terms=4, complex_coefficients=True)
        g = random_polynomial(3, rng, max_degree=2, max_terms=3)
        for i in range(1, 4):
            assert (f * g).partial(i) == f.partial(i) * g + f * g.partial(i)
            for j in range(1, 4):
                assert f.partial(i).partial(j) == f.partial(j).partial(i)


@pytest.mark.parametrize("index", [0, 3, -1])
def test_partial_index_out_of_range(xs, index):
    x1, _ = xs
    with pytest.raises(InputError) as info:
        x1.partial(index)
    assert info.value.exit_code == 2

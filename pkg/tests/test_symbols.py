# tests/test_symbols.py
import pytest

from src.algebra.polynomials import BasePolynomial
from src.algebra.scalars import I, Scalar
from src.algebra.symbols import (
    GradedFunction,
    ModelSignature,
    gf_product,
    linear_coefficients,
    linear_symbol,
    poisson,
    tau,
    wedge_metric,
)
from src.errors import DegenerateMetricError, DimensionError, DomainError
from tests.conftest import random_symbol


def _sign(F: GradedFunction, G: GradedFunction) -> int:
    return -1 if F.homogeneous_degree() * G.homogeneous_degree() % 2 else 1


def test_signature_validation():
    with pytest.raises(DegenerateMetricError):
        ModelSignature(0, 2, [[1, 2], [0, 1]])
    with pytest.raises(DegenerateMetricError):
        ModelSignature(0, 2, [[1, 1], [1, 1]])
    with pytest.raises(DegenerateMetricError):
        ModelSignature(0, 1, [[I]])
    with pytest.raises(DimensionError):
        ModelSignature(0, 2, [[1, 0, 0]])


def test_canonical_brackets(mixed_signature):
    sig = mixed_signature
    assert poisson(GradedFunction.p(sig, 1), GradedFunction.x(sig, 1)) == GradedFunction.one(sig)
    assert poisson(GradedFunction.p(sig, 1), GradedFunction.x(sig, 2)).is_zero()
    for a in range(1, 5):
        for b in range(1, 5):
            value = poisson(GradedFunction.xi(sig, a), GradedFunction.xi(sig, b))
            assert value == GradedFunction.function(sig, sig.g(a, b))


def test_graded_commutativity(mixed_signature):
    sig = mixed_signature
    xi1, xi2 = GradedFunction.xi(sig, 1), GradedFunction.xi(sig, 2)
    assert gf_product(xi1, xi2) == -gf_product(xi2, xi1)
    assert gf_product(xi1, xi1).is_zero()
    p1 = GradedFunction.p(sig, 1)
    assert gf_product(p1, xi1) == gf_product(xi1, p1)


def test_skew_symmetry(mixed_signature, rng):
    sig = mixed_signature
    for _ in range(100):
        F = random_symbol(sig, rng, int(rng.integers(1, 5)))
        G = random_symbol(sig, rng, int(rng.integers(1, 5)))
        assert poisson(F, G) == -poisson(G, F).scale(_sign(F, G))


def test_leibniz_rule(mixed_signature, rng):
    sig = mixed_signature
    for _ in range(20):
        F, G, H = (random_symbol(sig, rng, int(rng.integers(1, 4))) for _ in range(3))
        left = poisson(F, G * H)
        right = poisson(F, G) * H + (G * poisson(F, H)).scale(_sign(F, G))
        assert left == right


@pytest.mark.slow
def test_jacobi_identity(mixed_signature, rng):
    sig = mixed_signature
    for _ in range(100):
        F, G, H = (random_symbol(sig, rng, int(rng.integers(1, 5))) for _ in range(3))
        left = poisson(F, poisson(G, H))
        right = poisson(poisson(F, G), H) + poisson(G, poisson(F, H)).scale(_sign(F, G))
        assert left == right


def test_poisson_lowers_degree_by_two(mixed_signature, rng):
    sig = mixed_signature
    F, G = random_symbol(sig, rng, 3), random_symbol(sig, rng, 4)
    bracket = poisson(F, G)
    assert bracket.is_zero() or bracket.homogeneous_degree() == 5


def test_tau_is_an_involution(mixed_signature, rng):
    sig = mixed_signature
    for degree in range(5):
        F = random_symbol(sig, rng, degree).scale(Scalar(1, 0, 2))
        assert tau(tau(F)) == F
    xi1 = GradedFunction.xi(sig, 1)
    assert tau(xi1) == xi1.scale(I)
    xi12 = GradedFunction.xi(sig, 1) * GradedFunction.xi(sig, 2)
    assert tau(xi12) == xi12


def test_odd_derivatives(mixed_signature):
    sig = mixed_signature
    xi1, xi2, xi3 = (GradedFunction.xi(sig, a) for a in (1, 2, 3))
    product = xi1 * xi2 * xi3
    assert product.left_derivative(2) == -(xi1 * xi3)
    assert product.right_derivative(2) == -(xi1 * xi3)
    assert product.left_derivative(1) == xi2 * xi3
    assert product.right_derivative(3) == xi1 * xi2


def test_decompositions(mixed_signature):
    sig = mixed_signature
    F = GradedFunction.xi(sig, 1) + GradedFunction.p(sig, 2) + GradedFunction.x(sig, 1)
    parts = F.euler_decompose()
    assert sorted(parts) == [0, 1, 2]
    assert F.restrict_p_free() == GradedFunction.xi(sig, 1) + GradedFunction.x(sig, 1)
    assert F.parity_decompose()[1] == GradedFunction.xi(sig, 1)
    with pytest.raises(DomainError):
        F.homogeneous_degree()


def test_linear_symbols_and_wedge_metric(mixed_signature):
    sig = mixed_signature
    x1 = BasePolynomial.variable(1, 2)
    u = [x1, BasePolynomial.one(2), BasePolynomial.zero(2), x1 * 2]
    assert linear_coefficients(linear_symbol(sig, u)) == u
    xi12 = GradedFunction.xi(sig, 1) * GradedFunction.xi(sig, 2)
    # Gram determinant of the (1, 2) block
    assert wedge_metric(xi12, xi12) == 2
    with pytest.raises(DomainError):
        wedge_metric(GradedFunction.p(sig, 1), xi12)

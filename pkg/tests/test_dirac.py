# tests/test_dirac.py

from fractions import Fraction

import pytest

from src.algebra.operators import SpinorOperator, adjoint, op_compose, operators_agree
from src.algebra.scalars import Scalar
from src.errors import DomainError, UnsupportedError
from src.geometry.calibration import so3
from src.geometry.courant import build_theta, dorfman, random_section
from src.geometry.dirac import (
    commutator_bracket,
    derived_commutator,
    dirac_explicit,
    dirac_square,
    dirac_weyl,
    fE_from_square,
    invariant_fE,
    square_scalar,
)

INVARIANTS = {
    "so3_pair": 2,
    "book_double": 4,
    "sl2_double": 0,
    "standard_r3": 0,
    "twisted_r4_closed": 0,
    "rank1_modular": 0,
}


@pytest.mark.parametrize("name", ["so3_pair", "book_double", "standard_r3", "twisted_r4_closed"])
def test_weyl_and_explicit_paths_agree(load, name):
    K = load(name).courant_data()
    D = dirac_weyl(build_theta(K))
    assert D == dirac_explicit(K)
    assert adjoint(D) == -D


@pytest.mark.parametrize("name, expected", sorted(INVARIANTS.items()))
def test_invariant_values(load, name, expected):
    K = load(name).courant_data()
    assert invariant_fE(K) == expected
    assert fE_from_square(dirac_weyl(build_theta(K))) == expected


def test_invariant_on_odd_rank():
    assert invariant_fE(so3()) == 1
    with pytest.raises(UnsupportedError):
        dirac_weyl(build_theta(so3()))
    with pytest.raises(UnsupportedError):
        dirac_explicit(so3())


def test_standard_courant_squares_to_zero(load):
    K = load("standard_r3").courant_data()
    D = dirac_weyl(build_theta(K))
    square, degree = dirac_square(D)
    assert square.is_zero()
    assert square_scalar(D) == 0
    assert derived_commutator(D) == K


def test_open_twist_is_not_a_function(load):
    K = load("twisted_r4_open").courant_data()
    D = dirac_weyl(build_theta(K))
    square, degree = dirac_square(D)
    assert not square.is_multiplication()
    assert degree > 0
    with pytest.raises(DomainError):
        square_scalar(D)
    assert derived_commutator(D) == K


@pytest.mark.parametrize("name", ["standard_r3", "twisted_r4_closed", "book_double"])
def test_commutator_bracket_is_dorfman(load, rng, name):
    K = load(name).courant_data()
    D = dirac_weyl(build_theta(K))
    assert derived_commutator(D) == K
    for _ in range(3):
        u, v = random_section(K, rng), random_section(K, rng)
        assert commutator_bracket(D, u, v) == dorfman(K, u, v)


@pytest.mark.parametrize(
    "name", ["book_double", "sl2_double", "standard_r3", pytest.param("twisted_r4_closed", marks=pytest.mark.slow)]
)
def test_square_acts_on_spinors_as_invariant(load, name):
    model = load(name)
    K = model.courant_data()
    D = dirac_weyl(build_theta(K))
    square = op_compose(D, D)
    expected = SpinorOperator.function(K.signature, invariant_fE(K).scale(Scalar(Fraction(-1, 8))))
    frame = model.frame()
    assert operators_agree(square, expected, frame)
    if not expected.is_zero():
        assert not operators_agree(square, SpinorOperator.zero(K.signature), frame)

# tests/test_bialgebroid.py
import pytest

from src.algebra.scalars import SQRT2, Scalar
from src.algebra.weyl import quantize
from src.errors import InputError
from src.geometry.aspinor import ASpinorOperator, Form
from src.geometry.bialgebroid import (
    HALF,
    LieAlgebroidData,
    bialg_check,
    bialg_invariant,
    bialg_invariant_formula,
    bialg_operator,
    double,
    double_theta,
    hamiltonian_lift,
    homological_field,
    homological_Q,
    lie_Q,
    modular_cocycle,
    qhat_star,
)
from src.geometry.courant import axiom_check, build_theta
from src.geometry.dirac import dirac_weyl, invariant_fE
from tests.conftest import SEED

INVARIANTS = {"book_pair": Scalar(-1) / 2, "sl2_double": 0, "rank1_modular": 0, "tangent_r2": 0}


@pytest.mark.parametrize("name", ["sl2_double", "book_pair", "tangent_r2", "rank1_modular"])
def test_homological_fields_square_to_zero(load, name):
    L, Lstar = load(name).pair()
    for side in (L, Lstar):
        Q = homological_Q(side)
        assert Q.compose(Q).is_zero()


@pytest.mark.parametrize("name", ["book_pair", "rank1_modular", "tangent_r2"])
def test_lie_derivative_along_q(load, name):
    L, _ = load(name).pair()
    eta0 = Form.linear(L.n, L.r, modular_cocycle(L))
    assert lie_Q(L) == homological_Q(L) + ASpinorOperator.multiplication(eta0).scale(HALF)


def test_modular_cocycles(load):
    L, Lstar = load("book_pair").pair()
    assert modular_cocycle(L) == [1, 0]
    assert modular_cocycle(Lstar) == [1, 0]
    L, Lstar = load("rank1_modular").pair()
    assert modular_cocycle(L) == [1]
    assert modular_cocycle(Lstar) == [0]
    L, _ = load("tangent_r2").pair()
    assert modular_cocycle(L) == [0, 0]


@pytest.mark.parametrize("name, expected", sorted(INVARIANTS.items()))
def test_bialgebroid_invariant(load, name, expected):
    L, Lstar = load(name).pair()
    value = bialg_invariant(L, Lstar)
    assert value == expected
    assert bialg_invariant_formula(L, Lstar) == expected
    assert invariant_fE(double(L, Lstar)) == value.scale(-8)


def test_bialg_check(load):
    L, Lstar = load("sl2_double").pair()
    report = bialg_check(L, Lstar, seed=SEED, workers=2)
    assert report.passed, str(report)

    L, Lstar = load("sl2_broken").pair()
    report = bialg_check(L, Lstar, seed=SEED)
    assert not report.passed
    by_name = {c.name: c.passed for c in report.checks}
    assert by_name["Q^2 = 0 on A"] and by_name["Q^2 = 0 on A*"]
    assert not by_name["Courant axioms on the double"]
    assert not by_name["master equation {Θ,Θ} = 0"]
    assert not by_name["W^2 is a base function"]
    assert by_name["three criteria agree"]


def test_double(load):
    L, Lstar = load("book_pair").pair()
    K = double(L, Lstar)
    assert load("book_double").courant_data() == K
    assert axiom_check(K, seed=SEED).passed
    assert K.m == 2 * L.r


def test_invalid_pairs():
    with pytest.raises(InputError):
        LieAlgebroidData.build(0, 2, None, {(1, 2, 2): 1})
    skew = LieAlgebroidData.build(0, 2, None, {(1, 2, 2): 1}, complete_skew=True)
    assert skew.C(2, 2, 1) == -1
    with pytest.raises(InputError):
        double(skew, LieAlgebroidData.build(1, 2))
    with pytest.raises(InputError):
        qhat_star(skew, 0)


@pytest.mark.parametrize("name", ["book_pair", "rank1_modular", "tangent_r2", "sl2_double"])
def test_hamiltonian_lifts(load, name):
    L, Lstar = load(name).pair()
    lifted = hamiltonian_lift(homological_field(L)) + hamiltonian_lift(homological_field(Lstar), dual=True)
    assert build_theta(double(L, Lstar)) == lifted.scale(SQRT2)
    # quantized lift of a field is its Lie derivative on half-densities
    X = homological_field(L)
    assert ASpinorOperator.from_spinor_operator(quantize(hamiltonian_lift(X)), L.r) == lie_Q(L)
    D = dirac_weyl(build_theta(double(L, Lstar)))
    assert ASpinorOperator.from_spinor_operator(D, L.r) == bialg_operator(L, Lstar).scale(SQRT2)


def _qhat_closed_form(Lstar):
    n, r = Lstar.n, Lstar.r
    result = ASpinorOperator.zero(n, r)
    for a in range(1, r + 1):
        d_a = ASpinorOperator.d_eta(n, r, a)
        for i in range(1, n + 1):
            rho = ASpinorOperator.function(n, r, Lstar.rho(a, i))
            result = result - rho * d_a * ASpinorOperator.d_x(n, r, i)
        for b in range(1, r + 1):
            d_b = ASpinorOperator.d_eta(n, r, b)
            for c in range(1, r + 1):
                coeff = ASpinorOperator.function(n, r, Lstar.C(c, a, b))
                result = result + (coeff * ASpinorOperator.eta(n, r, c) * d_a * d_b).scale(HALF)
            result = result + ASpinorOperator.function(n, r, Lstar.C(b, a, b)) * d_a
    return result


@pytest.mark.parametrize("name", ["book_pair", "sl2_double"])
def test_qhat_star_closed_form_and_reference_scale(load, name):
    _, Lstar = load(name).pair()
    expected = qhat_star(Lstar)
    assert expected == _qhat_closed_form(Lstar)
    assert qhat_star(Lstar, Scalar(3)) == expected
    assert qhat_star(Lstar, SQRT2) == expected


@pytest.mark.parametrize("name", ["book_pair", "sl2_double", "rank1_modular", "tangent_r2"])
def test_double_theta_from_lifts(load, name):
    L, Lstar = load(name).pair()
    K, theta = double_theta(L, Lstar)
    lifted = hamiltonian_lift(homological_field(L)) + hamiltonian_lift(homological_field(Lstar), dual=True)
    assert theta == lifted.scale(SQRT2)
    assert K == double(L, Lstar)
    assert build_theta(K) == theta
    report = bialg_check(L, Lstar, seed=SEED)
    by_name = {c.name: c.passed for c in report.checks}
    assert by_name["lifted Θ matches the Dorfman double"]
    assert by_name["D = √2·W on ∧A*"]

# tests/test_courant.py
import pytest

from src.algebra.polynomials import BasePolynomial
from src.algebra.symbols import GradedFunction
from src.errors import DimensionError, DomainError, InputError
from src.geometry.calibration import so3
from src.geometry.courant import (
    CourantData,
    anchor_apply,
    axiom_check,
    build_theta,
    derived_anchor,
    derived_bracket,
    derived_structure,
    dorfman,
    frame_section,
    master_equation,
    quadratic_lie,
    random_section,
    standard_courant,
    torsion,
    twisted_standard,
)
from src.geometry.dirac import invariant_fE
from tests.conftest import SEED, random_symbol


def test_standard_courant_passes(load):
    K = load("standard_r3").courant_data()
    assert K == standard_courant(3)
    report = axiom_check(K, seed=SEED, workers=2)
    assert report.passed, str(report)
    theta = build_theta(K)
    assert master_equation(theta).is_zero()
    assert derived_structure(theta) == K


def test_twisted_models(load):
    x4 = BasePolynomial.variable(4, 4)
    closed = load("twisted_r4_closed").courant_data()
    assert closed == twisted_standard(4, {(1, 2, 4): x4})
    assert axiom_check(closed, seed=SEED).passed
    assert master_equation(build_theta(closed)).is_zero()

    opened = load("twisted_r4_open").courant_data()
    assert opened == twisted_standard(4, {(1, 2, 3): x4})
    report = axiom_check(opened, seed=SEED)
    assert not report.passed
    names = [c.name for c in report.failures()]
    assert "jacobi (frame)" in names
    assert "leibniz" not in names
    assert not master_equation(build_theta(opened)).is_zero()
    assert derived_structure(build_theta(opened)) == opened


def test_quadratic_lie_algebras(load):
    K = so3()
    assert load("so3").courant_data() == K
    assert axiom_check(K, seed=SEED).passed
    e1, e2, e3 = (frame_section(K, a) for a in (1, 2, 3))
    assert dorfman(K, e1, e2) == e3
    assert dorfman(K, e2, e1) == [-c for c in e3]
    sig = K.signature
    xi = [GradedFunction.xi(sig, a) for a in (1, 2, 3)]
    assert torsion(K) == xi[0] * xi[1] * xi[2]

    perturbed = load("so3_perturbed").courant_data()
    assert not axiom_check(perturbed, seed=SEED).passed


def test_change_frame_keeps_the_invariant():
    K = so3()
    P = [[1, 1, 0], [0, 1, 0], [0, 0, 2]]
    moved = K.change_frame(P)
    assert moved.signature != K.signature
    assert invariant_fE(moved) == invariant_fE(K) == 1
    assert axiom_check(moved, seed=SEED).passed


@pytest.mark.parametrize("name", ["standard_r3", "twisted_r4_closed", "twisted_r4_open"])
def test_derived_bracket_matches_dorfman(load, rng, name):
    K = load(name).courant_data()
    theta = build_theta(K)
    for _ in range(3):
        u, v = random_section(K, rng), random_section(K, rng)
        assert derived_bracket(theta, u, v) == dorfman(K, u, v)
        f = BasePolynomial.variable(1, K.n) * BasePolynomial.variable(2, K.n)
        assert derived_anchor(theta, u, f) == anchor_apply(K, u, f)


def test_invalid_data():
    with pytest.raises(InputError):
        twisted_standard(3, {(2, 1, 3): 1})
    with pytest.raises(DimensionError):
        quadratic_lie({(1, 2, 4): 1}, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    K = standard_courant(2)
    with pytest.raises(InputError):
        dorfman(K, frame_section(K, 1), [BasePolynomial.zero(2)])
    with pytest.raises(DomainError):
        derived_structure(GradedFunction.xi(K.signature, 1) * GradedFunction.xi(K.signature, 2))
    assert isinstance(CourantData.build(K.signature), CourantData)


def test_round_trip_on_random_pre_courant_data(mixed_signature, rng):
    for _ in range(20):
        theta = random_symbol(mixed_signature, rng, 3, terms=4)
        K = derived_structure(theta)
        assert build_theta(K) == theta
        assert derived_structure(build_theta(K)) == K

# tests/test_clifford.py
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from src.algebra.clifford import (
    CliffordElement,
    WittFrame,
    chevalley,
    cl_reverse,
    cl_symbol,
    default_witt_frame,
    split_frame,
    witt_rep,
)
from src.algebra.polynomials import BasePolynomial
from src.algebra.scalars import Scalar
from src.algebra.symbols import GradedFunction, ModelSignature
from src.errors import DomainError, InputError, UnsupportedError
from src.geometry.courant import duality_metric


def _generators(sig):
    return [CliffordElement.generator(sig, a) for a in range(1, sig.m + 1)]


def _monomial(sig, subset):
    result = GradedFunction.one(sig)
    for a in subset:
        result = result * GradedFunction.xi(sig, a)
    return result


def test_generator_relation(mixed_signature):
    sig = mixed_signature
    c = _generators(sig)
    for a in range(sig.m):
        for b in range(sig.m):
            assert c[a] * c[b] + c[b] * c[a] == 2 * sig.g(a + 1, b + 1)


def test_chevalley_is_inverted_by_cl_symbol(mixed_signature):
    sig = mixed_signature
    for size in range(sig.m + 1):
        for subset in combinations(range(1, sig.m + 1), size):
            mu = _monomial(sig, subset)
            assert cl_symbol(chevalley(mu)) == mu


def test_chevalley_low_degrees(mixed_signature):
    sig = mixed_signature
    c1, c2 = CliffordElement.generator(sig, 1), CliffordElement.generator(sig, 2)
    xi1, xi2 = GradedFunction.xi(sig, 1), GradedFunction.xi(sig, 2)
    assert chevalley(xi1) == c1
    assert chevalley(xi1 * xi2) == c1 * c2 - sig.g(1, 2)
    # the Chevalley image of a 2-form is skew
    assert chevalley(xi1 * xi2) == (c1 * c2 - c2 * c1) * Scalar(Fraction(1, 2))
    with pytest.raises(DomainError):
        chevalley(GradedFunction.p(sig, 1))


def test_reverse(mixed_signature):
    sig = mixed_signature
    c1, c2, c3 = (CliffordElement.generator(sig, a) for a in (1, 2, 3))
    assert cl_reverse(c1 * c2) == c2 * c1
    assert cl_reverse(c1 * c2 * c3) == c3 * c2 * c1
    assert cl_reverse(cl_reverse(c1 * c2 * c3)) == c1 * c2 * c3


def test_polynomial_coefficients(mixed_signature):
    sig = mixed_signature
    x1 = BasePolynomial.variable(1, 2)
    u = CliffordElement.from_vector(sig, [x1, 0, 1, 0])
    assert u * u == sig.pairing([x1, 0, 1, 0], [x1, 0, 1, 0])
    assert u.filtration_degree() == 1
    with pytest.raises(InputError):
        CliffordElement(sig, {(2, 1): 1})


def _witt_relation_holds(frame: WittFrame) -> bool:
    sig = frame.sig
    matrices = [witt_rep(c, frame) for c in _generators(sig)]
    for a in range(sig.m):
        for b in range(sig.m):
            total = np.dot(matrices[a], matrices[b]) + np.dot(matrices[b], matrices[a])
            target = 2 * sig.g(a + 1, b + 1)
            for (i, j), entry in np.ndenumerate(total):
                if entry != (target if i == j else 0):
                    return False
    return True


@pytest.mark.parametrize(
    "metric",
    [
        [[1, 0], [0, -1]],
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]],
        duality_metric(2),
    ],
)
def test_witt_representation(metric):
    sig = ModelSignature(0, len(metric), metric)
    frame = default_witt_frame(sig)
    assert frame.dim == 2 ** (sig.m // 2)
    assert _witt_relation_holds(frame)


def test_split_frame_and_unsupported_metrics(mixed_signature):
    sig = ModelSignature(1, 4, duality_metric(2))
    assert _witt_relation_holds(split_frame(sig))
    with pytest.raises(UnsupportedError):
        default_witt_frame(mixed_signature)
    with pytest.raises(UnsupportedError):
        default_witt_frame(ModelSignature(0, 3))
    with pytest.raises(InputError):
        WittFrame(ModelSignature(0, 2), [[1, 0]], [[0, 1]])

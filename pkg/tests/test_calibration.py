# tests/test_calibration.py
import pytest

from src.algebra.scalars import Scalar
from src.errors import DomainError
from src.geometry.calibration import calibrate, levi_civita, so3
from src.geometry.courant import THETA_ANCHOR_SCALE, THETA_TORSION_SCALE


def test_levi_civita():
    assert levi_civita(1, 2, 3) == levi_civita(2, 3, 1) == 1
    assert levi_civita(2, 1, 3) == levi_civita(1, 3, 2) == -1
    assert levi_civita(1, 1, 2) == 0


def test_so3_structure():
    K = so3()
    assert K.T(1, 2, 3) == 1
    assert K.T(2, 1, 3) == -1
    assert K.T(1, 2, 2).is_zero()


@pytest.mark.slow
def test_calibration_finds_the_shipped_constants():
    assert calibrate() == (Scalar(1), Scalar(-1)) == (THETA_ANCHOR_SCALE, THETA_TORSION_SCALE)


def test_calibration_needs_models():
    with pytest.raises(DomainError):
        calibrate([])

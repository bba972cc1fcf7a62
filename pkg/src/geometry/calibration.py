# src/geometry/calibration.py
from __future__ import annotations

import logging
import time
from fractions import Fraction
from itertools import product as cartesian
from typing import List, Optional, Sequence, Tuple

from src.algebra.scalars import Scalar
from src.errors import DomainError
from src.geometry.courant import (
    CourantData,
    build_theta,
    derived_structure,
    master_equation,
    quadratic_lie,
    standard_courant,
)

logger = logging.getLogger(__name__)

ANCHOR_GRID = [Fraction(s) * v for s in (1, -1) for v in (1, Fraction(1, 2), 2)]
TORSION_GRID = [Fraction(s) * v for s in (1, -1) for v in (1, Fraction(1, 3), 3)]


def levi_civita(a: int, b: int, c: int) -> int:
    if len({a, b, c}) < 3:
        return 0
    inversions = sum(1 for x, y in ((a, b), (a, c), (b, c)) if x > y)
    return -1 if inversions % 2 else 1


def so3() -> CourantData:
    """so(3) with the identity metric and [e_a, e_b] = ε_abc e_c."""
    structure = {
        (a, b, c): levi_civita(a, b, c)
        for a, b, c in cartesian(range(1, 4), repeat=3)
        if levi_civita(a, b, c)
    }
    return quadratic_lie(structure)


def calibration_models() -> List[CourantData]:
    """The anchor term needs ρ ≠ 0 and the torsion term needs C ≠ 0."""
    return [standard_courant(3), so3()]


def _passes(K: CourantData, anchor_scale: Scalar, torsion_scale: Scalar) -> bool:
    theta = build_theta(K, anchor_scale, torsion_scale)
    return derived_structure(theta) == K and master_equation(theta).is_zero()


def calibrate(models: Optional[Sequence[CourantData]] = None) -> Tuple[Scalar, Scalar]:
    """Unique (λ_ρ, λ_C) on the search grid for which Θ round-trips and solves {Θ, Θ} = 0."""
    models = list(models) if models is not None else calibration_models()
    start_time = time.time()
    found = [
        (Scalar(r), Scalar(c))
        for r, c in cartesian(ANCHOR_GRID, TORSION_GRID)
        if all(_passes(K, Scalar(r), Scalar(c)) for K in models)
    ]
    logger.info("calibration searched %d pairs in %.2fs", len(ANCHOR_GRID) * len(TORSION_GRID), time.time() - start_time)
    if len(found) != 1:
        raise DomainError(f"Calibration expected one solution, found {len(found)}: {found}")
    return found[0]


if __name__ == "__main__":
    from src.geometry.courant import THETA_ANCHOR_SCALE, THETA_TORSION_SCALE

    try:
        constants = calibrate()
        assert constants == (THETA_ANCHOR_SCALE, THETA_TORSION_SCALE)
        print(f"✅ calibration self-check passed: λ_ρ = {constants[0]}, λ_C = {constants[1]}")
    except Exception as e:
        print(f"❌ calibration self-check failed: {e}")

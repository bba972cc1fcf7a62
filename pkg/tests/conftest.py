# tests/conftest.py
import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.algebra.polynomials import random_polynomial
from src.algebra.symbols import GradedFunction, ModelSignature
from src.cli.model_file import load_model

MODELS = Path(__file__).resolve().parent.parent / "models"
SEED = 20240601


def model_path(name: str) -> str:
    return str(MODELS / f"{name}.model")


def random_symbol(sig: ModelSignature, rng: np.random.Generator, degree: int, terms: int = 2) -> GradedFunction:
    """Homogeneous symbol of the given degree with small polynomial coefficients."""
    total = GradedFunction.zero(sig)
    for _ in range(terms):
        low = max(0, -(-(degree - sig.m) // 2))
        high = degree // 2 if sig.n else 0
        if low > high:
            raise ValueError(f"No degree-{degree} symbols on {sig}")
        momenta = int(rng.integers(low, high + 1))
        odd = degree - 2 * momenta
        subset = tuple(sorted(int(a) for a in rng.choice(np.arange(1, sig.m + 1), size=odd, replace=False)))
        beta = [0] * sig.n
        for _ in range(momenta):
            beta[int(rng.integers(0, sig.n))] += 1
        coef = random_polynomial(sig.n, rng, max_degree=1, max_terms=2)
        total = total + GradedFunction.monomial(sig, subset, tuple(beta), coef)
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def mixed_signature():
    """n = 2, m = 4 with a non-diagonal metric."""
    metric = [[1, 1, 0, 0], [1, 3, 0, 0], [0, 0, -1, 0], [0, 0, 0, 2]]
    return ModelSignature(2, 4, metric)


@pytest.fixture
def load():
    return lambda name: load_model(model_path(name))

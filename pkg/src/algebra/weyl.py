# src/algebra/weyl.py
from __future__ import annotations

import logging
from fractions import Fraction

from src.algebra.clifford import chevalley
from src.algebra.operators import SpinorOperator, op_compose, order, principal_symbol
from src.algebra.polynomials import multi_binomial, sub_multi_indices
from src.algebra.scalars import Scalar
from src.algebra.symbols import GradedFunction, gf_product
from src.errors import DomainError

logger = logging.getLogger(__name__)


def quantize(symbol: GradedFunction) -> SpinorOperator:
    """Weyl quantization at ħ = i.

    f ξ_A p^β -> Σ_{δ≤β} (½)^{|δ|} binom(β, δ) (∂^δ f) 2^{-|A|/2} γ(ξ_A) ∂^{β-δ}
    """
    sig = symbol.sig
    result = SpinorOperator.zero(sig)
    for (subset, beta), coef in symbol.terms.items():
        clifford = SpinorOperator.clifford(chevalley(GradedFunction.monomial(sig, subset, (0,) * sig.n)))
        clifford = clifford.scale(Scalar.two_power_half(-len(subset)))
        for delta in sub_multi_indices(beta):
            df = coef.multi_partial(delta)
            if df.is_zero():
                continue
            weight = Scalar(Fraction(multi_binomial(beta, delta), 2 ** sum(delta)))
            rest = tuple(b - d for b, d in zip(beta, delta))
            term = op_compose(clifford, SpinorOperator.derivatives(sig, rest))
            result = result + df.scale(weight) * term
    return result


def dequantize(operator: SpinorOperator) -> GradedFunction:
    """Inverse of quantize by peeling principal symbols of descending order."""
    result = GradedFunction.zero(operator.sig)
    remainder = operator
    steps = 0
    while not remainder.is_zero():
        top = order(remainder)
        symbol = principal_symbol(remainder)
        result = result + symbol
        remainder = remainder - quantize(symbol)
        steps += 1
        if not remainder.is_zero() and order(remainder) >= top:
            raise DomainError("Dequantization failed to lower the order")
    logger.debug("dequantized operator in %d steps", steps)
    return result


def hbar_rescale(symbol: GradedFunction, t) -> GradedFunction:
    """Multiply the degree-k component by t^k."""
    t = Scalar.coerce(t)
    result = GradedFunction.zero(symbol.sig)
    for degree, part in symbol.euler_decompose().items():
        result = result + part.scale(t**degree)
    return result


def quantize_hbar(symbol: GradedFunction, t) -> SpinorOperator:
    return quantize(hbar_rescale(symbol, t))


# ===== Define the StarExpansion class =====
class StarExpansion:
    """Components B_{2k}(F, G) of the star product, keyed by k."""

    __slots__ = ("components",)

    def __init__(self, components: dict[int, GradedFunction]):
        self.components = {k: v for k, v in sorted(components.items()) if not v.is_zero()}

    def __getitem__(self, k: int) -> GradedFunction:
        return self.components[k]

    def get(self, k: int, sig=None) -> GradedFunction:
        if k in self.components:
            return self.components[k]
        if sig is None:
            raise KeyError(k)
        return GradedFunction.zero(sig)

    def keys(self):
        return self.components.keys()

    def items(self):
        return self.components.items()

    def __eq__(self, other):
        return isinstance(other, StarExpansion) and self.components == other.components

    def __repr__(self):
        inner = ", ".join(f"B{2 * k}: {v}" for k, v in self.components.items())
        return f"StarExpansion({inner})"


def _star_homogeneous(left: GradedFunction, right: GradedFunction) -> dict[int, GradedFunction]:
    total = left.homogeneous_degree() + right.homogeneous_degree()
    product = dequantize(op_compose(quantize(left), quantize(right)))
    components: dict[int, GradedFunction] = {}
    for degree, part in product.euler_decompose().items():
        gap = total - degree
        if gap < 0 or gap % 2:
            raise DomainError(f"Unexpected degree {degree} in the star product of degree-{total} inputs")
        # expansion parameter ħ/2i
        components[gap // 2] = part.scale(2 ** (gap // 2))
    return components


def star(left: GradedFunction, right: GradedFunction) -> StarExpansion:
    """B_{2k}(F, G), with B_0 the product and B_2 the Poisson bracket."""
    merged: dict[int, GradedFunction] = {}
    for left_part in left.euler_decompose().values():
        for right_part in right.euler_decompose().values():
            for k, value in _star_homogeneous(left_part, right_part).items():
                merged[k] = merged[k] + value if k in merged else value
    return StarExpansion(merged)


def star_product(left: GradedFunction, right: GradedFunction) -> GradedFunction:
    """Σ_k B_{2k}(F, G), the star product at ħ/2i = 1."""
    total = GradedFunction.zero(left.sig)
    for value in star(left, right).components.values():
        total = total + value
    return total


if __name__ == "__main__":
    from src.algebra.symbols import ModelSignature, poisson

    try:
        sig = ModelSignature(1, 0)
        x, p = GradedFunction.x(sig, 1), GradedFunction.p(sig, 1)
        expansion = star(p, x)
        assert expansion[0] == gf_product(p, x) and expansion[1] == poisson(p, x)
        print(f"✅ weyl self-check passed: {expansion}")
    except Exception as e:
        print(f"❌ weyl self-check failed: {e}")

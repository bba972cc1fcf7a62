# src/algebra/clifford.py
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Sequence

import numpy as np

from src.algebra.polynomials import BasePolynomial, join_signed
from src.algebra.scalars import ONE, ZERO, Scalar, matrix_inverse, to_matrix
from src.algebra.symbols import GradedFunction, ModelSignature, Subset, poisson, render_coefficient
from src.errors import DegenerateMetricError, DimensionError, DomainError, InputError, UnsupportedError

logger = logging.getLogger(__name__)


def _accumulate(target: dict, key, value):
    total = target[key] + value if key in target else value
    if total.is_zero():
        target.pop(key, None)
    else:
        target[key] = total


# ===== Normal ordering =====
@lru_cache(maxsize=None)
def _mul_gen_right(sig: ModelSignature, subset: Subset, b: int) -> tuple[tuple[Subset, Scalar], ...]:
    """c_A · c_b in the normal-ordered basis."""
    if not subset:
        return (((b,), ONE),)
    last, head = subset[-1], subset[:-1]
    if last < b:
        return ((subset + (b,), ONE),)
    if last == b:
        g = sig.g(b, b)
        return () if g.is_zero() else ((head, g),)
    # c_head c_last c_b = -(c_head c_b) c_last + 2 g(last, b) c_head
    result: dict[Subset, Scalar] = {}
    for s, coef in _mul_gen_right(sig, head, b):
        # every index of s is below `last`
        _accumulate(result, s + (last,), -coef)
    g = sig.g(last, b)
    if not g.is_zero():
        _accumulate(result, head, g * 2)
    return tuple(sorted(result.items()))


@lru_cache(maxsize=None)
def mul_monomials(sig: ModelSignature, left: Subset, right: Subset) -> tuple[tuple[Subset, Scalar], ...]:
    """c_left · c_right as a normal-ordered combination."""
    current: dict[Subset, Scalar] = {left: ONE}
    for b in right:
        step: dict[Subset, Scalar] = {}
        for s, coef in current.items():
            for t, c in _mul_gen_right(sig, s, b):
                _accumulate(step, t, coef * c)
        current = step
    return tuple(sorted(current.items()))


# ===== Define the CliffordElement class =====
class CliffordElement:
    """Σ_A f_A(x) c_A with c_A the increasing product of generators."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: ModelSignature, terms: dict[Subset, BasePolynomial] | None = None):
        self.sig = sig
        self.terms: dict[Subset, BasePolynomial] = {}
        for subset, coef in (terms or {}).items():
            subset = tuple(subset)
            if list(subset) != sorted(set(subset)) or any(not 1 <= a <= sig.m for a in subset):
                raise InputError(f"Invalid Clifford index set {subset}")
            if not isinstance(coef, BasePolynomial):
                coef = BasePolynomial.constant(coef, sig.n)
            if not coef.is_zero():
                self.terms[subset] = coef

    @classmethod
    def zero(cls, sig: ModelSignature) -> "CliffordElement":
        return cls(sig)

    @classmethod
    def scalar(cls, sig: ModelSignature, value) -> "CliffordElement":
        return cls(sig, {(): value})

    @classmethod
    def one(cls, sig: ModelSignature) -> "CliffordElement":
        return cls.scalar(sig, ONE)

    @classmethod
    def generator(cls, sig: ModelSignature, a: int) -> "CliffordElement":
        if not 1 <= a <= sig.m:
            raise DimensionError(f"Clifford generator c{a} outside rank {sig.m}")
        return cls(sig, {(a,): ONE})

    @classmethod
    def from_vector(cls, sig: ModelSignature, coefficients: Sequence) -> "CliffordElement":
        """c(u) = Σ_a u^a c_a."""
        return cls(sig, {(a,): coef for a, coef in enumerate(coefficients, start=1)})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "CliffordElement"):
        if other.sig != self.sig:
            raise DimensionError("Clifford elements live on different signatures")

    def __add__(self, other):
        if not isinstance(other, CliffordElement):
            try:
                other = CliffordElement.scalar(self.sig, other)
            except InputError:
                return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for subset, coef in other.terms.items():
            terms[subset] = terms[subset] + coef if subset in terms else coef
        return CliffordElement(self.sig, terms)

    __radd__ = __add__

    def __neg__(self):
        return CliffordElement(self.sig, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            return cl_product(self, other)
        if isinstance(other, BasePolynomial) or isinstance(other, (int, Scalar)):
            return CliffordElement(self.sig, {s: c * other for s, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def conj(self) -> "CliffordElement":
        return CliffordElement(self.sig, {s: c.conj() for s, c in self.terms.items()})

    def parity_part(self, parity: int) -> "CliffordElement":
        return CliffordElement(self.sig, {s: c for s, c in self.terms.items() if len(s) % 2 == parity})

    def filtration_degree(self) -> int:
        return max((len(s) for s in self.terms), default=-1)

    def __eq__(self, other):
        if isinstance(other, CliffordElement):
            return self.sig == other.sig and self.terms == other.terms
        if isinstance(other, (int, Scalar, BasePolynomial)):
            return self == CliffordElement.scalar(self.sig, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.sig, frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms.items(), key=lambda t: (-len(t[0]), t[0]))
        return join_signed([render_coefficient(c, "*".join(f"c{a}" for a in s)) for s, c in ordered])

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"CliffordElement({self.render()})"


def cl_product(left: CliffordElement, right: CliffordElement) -> CliffordElement:
    left._check(right)
    terms: dict[Subset, BasePolynomial] = {}
    for a_set, f in left.terms.items():
        for b_set, g in right.terms.items():
            fg = f * g
            for subset, coef in mul_monomials(left.sig, a_set, b_set):
                _accumulate(terms, subset, fg.scale(coef))
    return CliffordElement(left.sig, terms)


def clifford_generator(sig: ModelSignature, a: int) -> CliffordElement:
    return CliffordElement.generator(sig, a)


@lru_cache(maxsize=None)
def _reverse_monomial(sig: ModelSignature, subset: Subset) -> CliffordElement:
    result = CliffordElement.one(sig)
    for a in reversed(subset):
        result = result * CliffordElement.generator(sig, a)
    return result


def cl_reverse(u: CliffordElement) -> CliffordElement:
    """Anti-automorphism reversing generator order, c_{a1}...c_{ak} -> c_{ak}...c_{a1}."""
    total = CliffordElement.zero(u.sig)
    for subset, coef in u.terms.items():
        total = total + _reverse_monomial(u.sig, subset) * coef
    return total


# ===== Chevalley quantization map and its inverse =====
@lru_cache(maxsize=None)
def _chevalley_monomial(sig: ModelSignature, subset: Subset) -> CliffordElement:
    # γ(ξ_a η) = c_a γ(η) - γ({ξ_a, η})
    if not subset:
        return CliffordElement.one(sig)
    a, rest = subset[0], subset[1:]
    result = CliffordElement.generator(sig, a) * _chevalley_monomial(sig, rest)
    for j, b in enumerate(rest):
        g = sig.g(a, b)
        if g.is_zero():
            continue
        sign = ONE if j % 2 == 0 else -ONE
        result = result - _chevalley_monomial(sig, rest[:j] + rest[j + 1:]) * (g * sign)
    return result


def chevalley(symbol: GradedFunction) -> CliffordElement:
    """γ: ∧E -> ℂl(E) by skew-symmetrized products."""
    if not symbol.is_p_free():
        raise DomainError("Chevalley map needs a p-free symbol")
    total = CliffordElement.zero(symbol.sig)
    for (subset, _), coef in symbol.terms.items():
        total = total + _chevalley_monomial(symbol.sig, subset) * coef
    return total


@lru_cache(maxsize=None)
def _symbol_monomial(sig: ModelSignature, subset: Subset) -> GradedFunction:
    # c_a γ(s) = γ(ξ_a s + {ξ_a, s})
    if not subset:
        return GradedFunction.one(sig)
    a = subset[0]
    tail = _symbol_monomial(sig, subset[1:])
    xi_a = GradedFunction.xi(sig, a)
    return xi_a * tail + poisson(xi_a, tail)


def cl_symbol(u: CliffordElement) -> GradedFunction:
    """Inverse of the Chevalley map."""
    total = GradedFunction.zero(u.sig)
    for subset, coef in u.terms.items():
        total = total + _symbol_monomial(u.sig, subset) * coef
    return total


# ===== Define the WittFrame class =====
class WittFrame:
    """Maximal isotropic splitting E = span(e_α) ⊕ span(f^α) for an even-rank metric.

    The spinor module is ∧ span(f) with basis indexed by bitmasks S over the
    f-indices; c(f^α) acts by wedge and c(e_α) by 2 Σ_β G_{αβ} ι_β where
    G_{αβ} = g(e_α, f^β).
    """

    def __init__(self, sig: ModelSignature, e_vectors: Sequence[Sequence], f_vectors: Sequence[Sequence]):
        if sig.m % 2:
            raise UnsupportedError(f"Spinor module needs even rank, got m = {sig.m}")
        half = sig.m // 2
        e_rows, f_rows = to_matrix(e_vectors), to_matrix(f_vectors)
        if len(e_rows) != half or len(f_rows) != half or any(len(v) != sig.m for v in e_rows + f_rows):
            raise DimensionError(f"Witt frame needs {half} + {half} vectors of length {sig.m}")
        self.sig = sig
        self.half = half
        self.dim = 2**half
        self.e_vectors = e_rows
        self.f_vectors = f_rows

        def pair(u, v) -> Scalar:
            return sum((u[a] * sig.metric[a][b] * v[b] for a in range(sig.m) for b in range(sig.m)), ZERO)

        for family, name in ((e_rows, "e"), (f_rows, "f")):
            for u in family:
                for v in family:
                    if not pair(u, v).is_zero():
                        raise InputError(f"Witt frame vectors {name} are not isotropic")
        self.gram = [[pair(e, f) for f in f_rows] for e in e_rows]
        try:
            columns = [list(col) for col in zip(*(e_rows + f_rows))] if half else []
            self._coordinates = matrix_inverse(columns) if half else []
            if half:
                matrix_inverse(self.gram)
        except DomainError as e:
            raise DegenerateMetricError(f"Witt frame is degenerate: {e}") from e
        self._generators = [self._generator_matrix(a) for a in range(1, sig.m + 1)]
        self._monomials: dict[Subset, np.ndarray] = {(): _scalar_identity(self.dim)}

    # ----- spinor basis -----
    def _wedge(self, alpha: int) -> np.ndarray:
        matrix = _scalar_zeros(self.dim)
        bit = 1 << (alpha - 1)
        for s in range(self.dim):
            if not s & bit:
                sign = -ONE if bin(s & (bit - 1)).count("1") % 2 else ONE
                matrix[s | bit, s] = sign
        return matrix

    def _contract(self, beta: int) -> np.ndarray:
        matrix = _scalar_zeros(self.dim)
        bit = 1 << (beta - 1)
        for s in range(self.dim):
            if s & bit:
                sign = -ONE if bin(s & (bit - 1)).count("1") % 2 else ONE
                matrix[s ^ bit, s] = sign
        return matrix

    def _generator_matrix(self, a: int) -> np.ndarray:
        """Matrix of c_a, from the coordinates of the standard vector e_a in the frame."""
        matrix = _scalar_zeros(self.dim)
        for alpha in range(1, self.half + 1):
            e_coord = self._coordinates[alpha - 1][a - 1]
            f_coord = self._coordinates[self.half + alpha - 1][a - 1]
            if not e_coord.is_zero():
                for beta in range(1, self.half + 1):
                    g = self.gram[alpha - 1][beta - 1]
                    if not g.is_zero():
                        matrix = matrix + self._contract(beta) * (e_coord * g * 2)
            if not f_coord.is_zero():
                matrix = matrix + self._wedge(alpha) * f_coord
        return matrix

    def monomial_matrix(self, subset: Subset) -> np.ndarray:
        if subset not in self._monomials:
            head = self.monomial_matrix(subset[:-1])
            self._monomials[subset] = np.dot(head, self._generators[subset[-1] - 1])
        return self._monomials[subset]

    def vector_matrix(self, vector: Sequence) -> np.ndarray:
        """Matrix of c(v) for a constant vector v in the standard basis."""
        matrix = _scalar_zeros(self.dim)
        for a, v in enumerate(vector, start=1):
            v = Scalar.coerce(v)
            if not v.is_zero():
                matrix = matrix + self._generators[a - 1] * v
        return matrix

    def vacuum(self) -> list[BasePolynomial]:
        return basis_section(self.dim, 0, BasePolynomial.one(self.sig.n))


def _scalar_zeros(size: int) -> np.ndarray:
    matrix = np.empty((size, size), dtype=object)
    matrix.fill(ZERO)
    return matrix


def _scalar_identity(size: int) -> np.ndarray:
    matrix = _scalar_zeros(size)
    for i in range(size):
        matrix[i, i] = ONE
    return matrix


def basis_section(dim: int, index: int, coef: BasePolynomial) -> list[BasePolynomial]:
    section = [BasePolynomial.zero(coef.n) for _ in range(dim)]
    section[index] = coef
    return section


def witt_rep(u: CliffordElement, frame: WittFrame) -> np.ndarray:
    """Matrix of u on the spinor module, entries BasePolynomial."""
    if u.sig != frame.sig:
        raise DimensionError("Witt frame belongs to another signature")
    result = np.empty((frame.dim, frame.dim), dtype=object)
    result.fill(BasePolynomial.zero(u.sig.n))
    for subset, coef in u.terms.items():
        block = frame.monomial_matrix(subset)
        for (i, j), entry in np.ndenumerate(block):
            if not entry.is_zero():
                result[i, j] = result[i, j] + coef.scale(entry)
    return result


def default_witt_frame(sig: ModelSignature) -> WittFrame:
    """Witt frame for diagonal metrics (paired coordinates) or split block metrics."""
    m = sig.m
    if m % 2:
        raise UnsupportedError(f"Spinor module needs even rank, got m = {m}")
    half = m // 2
    metric = sig.metric
    off_diagonal = any(not metric[a][b].is_zero() for a in range(m) for b in range(m) if a != b)
    if not off_diagonal:
        e_vectors, f_vectors = [], []
        for alpha in range(half):
            a, b = 2 * alpha, 2 * alpha + 1
            d1, d2 = metric[a][a], metric[b][b]
            if not (d1.is_rational() and d2.is_rational()):
                raise UnsupportedError("Default Witt frame needs a rational diagonal metric")
            try:
                t = Scalar.sqrt_of_rational(-d1.rational() / d2.rational())
            except DomainError as e:
                raise UnsupportedError(f"No default Witt frame: {e}") from e
            e = [ZERO] * m
            f = [ZERO] * m
            e[a], e[b] = ONE, t
            f[a], f[b] = ONE, -t
            e_vectors.append(e)
            f_vectors.append(f)
        return WittFrame(sig, e_vectors, f_vectors)
    if all(metric[a][b].is_zero() for a in range(half) for b in range(half)) and all(
        metric[a][b].is_zero() for a in range(half, m) for b in range(half, m)
    ):
        return split_frame(sig)
    raise UnsupportedError("No default Witt frame for this metric; supply witt_frame in the model")


def split_frame(sig: ModelSignature) -> WittFrame:
    """Standard basis frame for metrics pairing the first and second halves."""
    half = sig.m // 2
    e_vectors = [[ONE if b == alpha else ZERO for b in range(sig.m)] for alpha in range(half)]
    f_vectors = [[ONE if b == half + alpha else ZERO for b in range(sig.m)] for alpha in range(half)]
    return WittFrame(sig, e_vectors, f_vectors)


if __name__ == "__main__":
    try:
        sig = ModelSignature(0, 2, [[1, 1], [1, 3]])
        c1, c2 = CliffordElement.generator(sig, 1), CliffordElement.generator(sig, 2)
        assert c1 * c2 + c2 * c1 == 2
        xi12 = GradedFunction.xi(sig, 1) * GradedFunction.xi(sig, 2)
        assert chevalley(xi12) == c1 * c2 - 1
        assert cl_symbol(c1 * c2) == xi12 + 1
        print("✅ clifford self-check passed")
    except Exception as e:
        print(f"❌ clifford self-check failed: {e}")

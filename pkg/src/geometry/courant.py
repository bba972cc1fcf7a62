# src/geometry/courant.py
from __future__ import annotations

import concurrent.futures
import logging
import time
from fractions import Fraction
from itertools import product as cartesian
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.algebra.polynomials import BasePolynomial, random_polynomial
from src.algebra.scalars import ONE, Scalar, matmul, matrix_inverse, to_matrix, transpose
from src.algebra.symbols import (
    GradedFunction,
    ModelSignature,
    linear_coefficients,
    linear_symbol,
    poisson,
)
from src.config import CONFIG
from src.errors import DimensionError, DomainError, InputError
from src.states.schemas import CheckResult, StructureReport, check

logger = logging.getLogger(__name__)

# Scales of the anchor and torsion parts of Θ, fixed by calibrate()
THETA_ANCHOR_SCALE = Scalar(1)
THETA_TORSION_SCALE = Scalar(-1)

Section = List[BasePolynomial]
BracketKey = Tuple[int, int, int]


def _poly(value, n: int) -> BasePolynomial:
    if isinstance(value, BasePolynomial):
        if value.n != n:
            raise DimensionError(f"Coefficient has {value.n} variables, expected {n}")
        return value
    return BasePolynomial.constant(Scalar.coerce(value), n)


# ===== Define the CourantData class =====
class CourantData(BaseModel):
    """Flat model of a (pre-)Courant algebroid on a constant frame e_1..e_m."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    signature: ModelSignature = Field(description="Base dimension, fiber rank and constant metric g_ab")
    anchor: Tuple[Tuple[BasePolynomial, ...], ...] = Field(
        description="Anchor coefficients, anchor[a-1][i-1] = ρ^i_a"
    )
    bracket: Dict[BracketKey, BasePolynomial] = Field(
        default_factory=dict, description="Dorfman structure functions keyed (a, b, c): ⟦e_a, e_b⟧ = T^c_ab e_c"
    )

    def __init__(self, **data):
        super().__init__(**data)
        self._validate()

    @field_validator("bracket", mode="before")
    @classmethod
    def drop_zero_entries(cls, value):
        if isinstance(value, dict):
            return {tuple(k): v for k, v in value.items() if not (hasattr(v, "is_zero") and v.is_zero())}
        return value

    def _validate(self):
        n, m = self.n, self.m
        if len(self.anchor) != m:
            raise DimensionError(f"Anchor has {len(self.anchor)} rows, expected rank {m}")
        for a, row in enumerate(self.anchor, start=1):
            if len(row) != n:
                raise DimensionError(f"Anchor row {a} has {len(row)} entries, expected {n}")
            for entry in row:
                if entry.n != n:
                    raise DimensionError(f"Anchor entry in row {a} has {entry.n} variables, expected {n}")
        for (a, b, c), value in self.bracket.items():
            if not all(1 <= k <= m for k in (a, b, c)):
                raise DimensionError(f"Bracket index ({a}, {b}, {c}) outside rank {m}")
            if value.n != n:
                raise DimensionError(f"Bracket entry ({a}, {b}, {c}) has {value.n} variables, expected {n}")

    @classmethod
    def build(
        cls,
        signature: ModelSignature,
        anchor: Optional[Sequence[Sequence]] = None,
        bracket: Optional[Dict[BracketKey, object]] = None,
    ) -> "CourantData":
        """Coerce plain numbers to polynomials; a missing anchor is zero."""
        n, m = signature.n, signature.m
        if anchor is None:
            anchor = [[0] * n for _ in range(m)]
        rows = tuple(tuple(_poly(v, n) for v in row) for row in anchor)
        entries = {tuple(k): _poly(v, n) for k, v in (bracket or {}).items()}
        return cls(signature=signature, anchor=rows, bracket=entries)

    @property
    def n(self) -> int:
        return self.signature.n

    @property
    def m(self) -> int:
        return self.signature.m

    def rho(self, a: int, i: int) -> BasePolynomial:
        return self.anchor[a - 1][i - 1]

    def T(self, a: int, b: int, c: int) -> BasePolynomial:
        return self.bracket.get((a, b, c), BasePolynomial.zero(self.n))

    def change_frame(self, P: Sequence[Sequence]) -> "CourantData":
        """Same algebroid on the frame e'_a = Σ_b P_ab e_b for a constant invertible P."""
        P = to_matrix(P)
        n, m = self.n, self.m
        if len(P) != m or any(len(row) != m for row in P):
            raise DimensionError(f"Frame change must be {m}x{m}")
        P_inv = matrix_inverse(P)
        metric = matmul(matmul(P, [list(r) for r in self.signature.metric]), transpose(P))
        signature = ModelSignature(n, m, metric)
        anchor = []
        for a in range(m):
            row = []
            for i in range(n):
                total = BasePolynomial.zero(n)
                for b in range(m):
                    if not P[a][b].is_zero():
                        total = total + self.anchor[b][i].scale(P[a][b])
                row.append(total)
            anchor.append(row)
        bracket: Dict[BracketKey, BasePolynomial] = {}
        for (d, e, f), value in self.bracket.items():
            for a, b, c in cartesian(range(1, m + 1), repeat=3):
                factor = P[a - 1][d - 1] * P[b - 1][e - 1] * P_inv[f - 1][c - 1]
                if factor.is_zero():
                    continue
                key = (a, b, c)
                bracket[key] = bracket[key] + value.scale(factor) if key in bracket else value.scale(factor)
        return CourantData.build(signature, anchor, bracket)

    def __eq__(self, other):
        if not isinstance(other, CourantData):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.anchor == other.anchor
            and self.bracket == other.bracket
        )

    def __str__(self) -> str:
        lines = [f"📋 Courant data (n={self.n}, m={self.m})"]
        for a in range(1, self.m + 1):
            for i in range(1, self.n + 1):
                if not self.rho(a, i).is_zero():
                    lines.append(f"  🔸 rho {a} {i}: {self.rho(a, i).render()}")
        for (a, b, c), value in sorted(self.bracket.items()):
            lines.append(f"  🔸 bracket {a} {b} {c}: {value.render()}")
        return "\n".join(lines)


# ===== Shipped constructors =====
def duality_metric(n: int) -> list[list[Fraction]]:
    """½-duality pairing on TM ⊕ T*M, frame order (∂_1..∂_n, dx^1..dx^n)."""
    m = 2 * n
    metric = [[Fraction(0)] * m for _ in range(m)]
    for i in range(n):
        metric[i][n + i] = metric[n + i][i] = Fraction(1, 2)
    return metric


def standard_courant(n: int) -> CourantData:
    """TM ⊕ T*M on ℝⁿ in the coordinate frame; every frame bracket vanishes."""
    signature = ModelSignature(n, 2 * n, duality_metric(n))
    anchor = [[1 if i == a else 0 for i in range(n)] for a in range(2 * n)]
    return CourantData.build(signature, anchor)


def twisted_standard(n: int, H: Dict[Tuple[int, int, int], object]) -> CourantData:
    """Standard Courant algebroid twisted by H = Σ_{i<j<k} H_ijk dx^i dx^j dx^k.

    ⟦∂_i, ∂_j⟧ = ι_j ι_i H, i.e. T^{n+k}_ij = H_ijk extended skew-symmetrically.
    """
    base = standard_courant(n)
    bracket: Dict[BracketKey, BasePolynomial] = {}
    for (i, j, k), value in H.items():
        if not (1 <= i < j < k <= n):
            raise InputError(f"H components must be keyed by i < j < k <= {n}, got ({i}, {j}, {k})")
        value = _poly(value, n)
        for (a, b, c), sign in (
            ((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
            ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1),
        ):
            bracket[(a, b, n + c)] = value if sign > 0 else -value
    return CourantData.build(base.signature, [list(row) for row in base.anchor], bracket)


def quadratic_lie(structure: Dict[BracketKey, object], metric: Optional[Sequence[Sequence]] = None) -> CourantData:
    """Quadratic Lie algebra as a Courant algebroid over a point: [e_a, e_b] = f^c_ab e_c."""
    size = len(metric) if metric is not None else max((max(k) for k in structure), default=0)
    signature = ModelSignature(0, size, metric)
    return CourantData.build(signature, None, structure)


# ===== Θ and its derived structure =====
def _raise_index(tensor: Dict[BracketKey, BasePolynomial], position: int, sig: ModelSignature):
    raised: Dict[BracketKey, BasePolynomial] = {}
    for key, value in tensor.items():
        for a in range(1, sig.m + 1):
            factor = sig.g_inv(a, key[position])
            if factor.is_zero():
                continue
            new_key = key[:position] + (a,) + key[position + 1:]
            term = value.scale(factor)
            raised[new_key] = raised[new_key] + term if new_key in raised else term
    return {k: v for k, v in raised.items() if not v.is_zero()}


def torsion(K: CourantData) -> GradedFunction:
    """C = Σ_{a<b<c} C^{abc} ξ_a ξ_b ξ_c with C_abc = (1/6) Σ_cyc (T_abc - T_bac)."""
    sig, n, m = K.signature, K.n, K.m
    lowered_T: Dict[BracketKey, BasePolynomial] = {}
    for (a, b, d), value in K.bracket.items():
        for c in range(1, m + 1):
            g = sig.g(d, c)
            if not g.is_zero():
                key = (a, b, c)
                lowered_T[key] = lowered_T[key] + value.scale(g) if key in lowered_T else value.scale(g)
    zero = BasePolynomial.zero(n)

    def T(a, b, c):
        return lowered_T.get((a, b, c), zero)

    sixth = Scalar(Fraction(1, 6))
    lowered: Dict[BracketKey, BasePolynomial] = {}
    for a, b, c in cartesian(range(1, m + 1), repeat=3):
        if len({a, b, c}) < 3:
            continue
        total = zero
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            total = total + T(x, y, z) - T(y, x, z)
        if not total.is_zero():
            lowered[(a, b, c)] = total.scale(sixth)
    raised = lowered
    for position in range(3):
        raised = _raise_index(raised, position, sig)
    terms = {}
    for (a, b, c), value in raised.items():
        if a < b < c:
            terms[((a, b, c), (0,) * n)] = value
    return GradedFunction(sig, terms)


def build_theta(
    K: CourantData,
    anchor_scale: Scalar = THETA_ANCHOR_SCALE,
    torsion_scale: Scalar = THETA_TORSION_SCALE,
) -> GradedFunction:
    """Θ = λ_ρ Σ ρ^i_a g^{ab} p_i ξ_b + λ_C C."""
    sig, n, m = K.signature, K.n, K.m
    terms = {}
    for i in range(1, n + 1):
        beta = tuple(1 if j == i else 0 for j in range(1, n + 1))
        for b in range(1, m + 1):
            total = BasePolynomial.zero(n)
            for a in range(1, m + 1):
                g_inv = sig.g_inv(a, b)
                if not g_inv.is_zero() and not K.rho(a, i).is_zero():
                    total = total + K.rho(a, i).scale(g_inv)
            if not total.is_zero():
                terms[((b,), beta)] = total.scale(anchor_scale)
    theta = GradedFunction(sig, terms) + torsion(K).scale(torsion_scale)
    logger.debug("built Θ with %d terms", len(theta.terms))
    return theta


def _check_theta(theta: GradedFunction):
    if not theta.is_zero() and theta.homogeneous_degree() != 3:
        raise DomainError(f"Θ must be homogeneous of degree 3, got degree {theta.homogeneous_degree()}")


def derived_structure(theta: GradedFunction) -> CourantData:
    """Anchor {{Θ, ξ_a}, x^i} and bracket coefficients of {{Θ, ξ_a}, ξ_b}."""
    _check_theta(theta)
    sig, n, m = theta.sig, theta.sig.n, theta.sig.m
    xs = [GradedFunction.x(sig, i) for i in range(1, n + 1)]
    xis = [GradedFunction.xi(sig, a) for a in range(1, m + 1)]
    anchor = []
    bracket: Dict[BracketKey, BasePolynomial] = {}
    for a in range(1, m + 1):
        first = poisson(theta, xis[a - 1])
        anchor.append([_function_value(poisson(first, x)) for x in xs])
        for b in range(1, m + 1):
            for c, value in enumerate(linear_coefficients(poisson(first, xis[b - 1])), start=1):
                if not value.is_zero():
                    bracket[(a, b, c)] = value
    return CourantData.build(sig, anchor, bracket)


def _function_value(symbol: GradedFunction) -> BasePolynomial:
    zero_key = ((), (0,) * symbol.sig.n)
    if any(key != zero_key for key in symbol.terms):
        raise DomainError(f"Expected a base function, got {symbol.render()}")
    return symbol.terms.get(zero_key, BasePolynomial.zero(symbol.sig.n))


def master_equation(theta: GradedFunction) -> GradedFunction:
    """{Θ, Θ}; zero exactly when the derived structure is Courant."""
    _check_theta(theta)
    return poisson(theta, theta)


# ===== Operations on sections =====
def _check_section(K: CourantData, u: Sequence[BasePolynomial]) -> Section:
    if len(u) != K.m:
        raise InputError(f"Section must have {K.m} components, got {len(u)}")
    return [_poly(v, K.n) for v in u]


def frame_section(K: CourantData, a: int, coef=ONE) -> Section:
    return [_poly(coef, K.n) if b == a else BasePolynomial.zero(K.n) for b in range(1, K.m + 1)]


def anchor_apply(K: CourantData, u: Sequence[BasePolynomial], f: BasePolynomial) -> BasePolynomial:
    """ρ(u)[f] = Σ u^a ρ^i_a ∂_i f."""
    u = _check_section(K, u)
    total = BasePolynomial.zero(K.n)
    for i in range(1, K.n + 1):
        df = f.partial(i)
        if df.is_zero():
            continue
        coefficient = BasePolynomial.zero(K.n)
        for a in range(1, K.m + 1):
            coefficient = coefficient + u[a - 1] * K.rho(a, i)
        total = total + coefficient * df
    return total


def metric_pairing(K: CourantData, u: Sequence[BasePolynomial], v: Sequence[BasePolynomial]) -> BasePolynomial:
    return K.signature.pairing(_check_section(K, u), _check_section(K, v))


def rho_star_d(K: CourantData, f: BasePolynomial) -> Section:
    """(ρ*df)^b = Σ_a g^{ab} ρ^i_a ∂_i f."""
    sig = K.signature
    covector = [anchor_apply(K, frame_section(K, a), f) for a in range(1, K.m + 1)]
    result = []
    for b in range(1, K.m + 1):
        total = BasePolynomial.zero(K.n)
        for a in range(1, K.m + 1):
            if not sig.g_inv(a, b).is_zero():
                total = total + covector[a - 1].scale(sig.g_inv(a, b))
        result.append(total)
    return result


def _add_sections(*sections: Section) -> Section:
    return [sum(parts[1:], parts[0]) for parts in zip(*sections)]


def _scale_section(u: Section, f) -> Section:
    return [v * f for v in u]


def dorfman(K: CourantData, u: Sequence[BasePolynomial], v: Sequence[BasePolynomial]) -> Section:
    """Dorfman bracket of polynomial sections, extended from the frame by the Leibniz rules.

    ⟦u, v⟧ = Σ_a u^a (Σ_b ρ(e_a)[v^b] e_b + Σ_b v^b T^c_ab e_c) - Σ_a ρ(v)[u^a] e_a + Σ_a g(e_a, v) ρ*du^a
    """
    u, v = _check_section(K, u), _check_section(K, v)
    n, m = K.n, K.m
    result = [BasePolynomial.zero(n) for _ in range(m)]
    for a in range(1, m + 1):
        ua = u[a - 1]
        if ua.is_zero():
            continue
        e_a = frame_section(K, a)
        for b in range(1, m + 1):
            result[b - 1] = result[b - 1] + ua * anchor_apply(K, e_a, v[b - 1])
        for (x, b, c), T in K.bracket.items():
            if x == a and not v[b - 1].is_zero():
                result[c - 1] = result[c - 1] + ua * v[b - 1] * T
    for a in range(1, m + 1):
        result[a - 1] = result[a - 1] - anchor_apply(K, v, u[a - 1])
    for a in range(1, m + 1):
        if u[a - 1].is_constant():
            continue
        pairing = metric_pairing(K, frame_section(K, a), v)
        if pairing.is_zero():
            continue
        result = _add_sections(result, _scale_section(rho_star_d(K, u[a - 1]), pairing))
    return result


def derived_bracket(theta: GradedFunction, u: Sequence[BasePolynomial], v: Sequence[BasePolynomial]) -> Section:
    """{{Θ, u}, v} on sections identified with linear symbols."""
    sig = theta.sig
    return linear_coefficients(poisson(poisson(theta, linear_symbol(sig, u)), linear_symbol(sig, v)))


def derived_anchor(theta: GradedFunction, u: Sequence[BasePolynomial], f: BasePolynomial) -> BasePolynomial:
    """{{Θ, u}, f}."""
    sig = theta.sig
    return _function_value(poisson(poisson(theta, linear_symbol(sig, u)), GradedFunction.function(sig, f)))


def random_section(K: CourantData, rng: np.random.Generator, max_degree: int = 2) -> Section:
    return [random_polynomial(K.n, rng, max_degree=max_degree, max_terms=2) for _ in range(K.m)]


# ===== Axiom battery =====
def _first_failure(
    name: str, sig: ModelSignature, cases: List[Tuple[str, Callable[[], object]]]
) -> CheckResult:
    """First nonzero residual; sections are reported as linear symbols."""
    for label, residual in cases:
        value = residual()
        if isinstance(value, list):
            value = linear_symbol(sig, value)
        if not value.is_zero():
            return check(name, value, label)
    return CheckResult(name=name, passed=True)


def _sub(u: Section, v: Section) -> Section:
    return [a - b for a, b in zip(u, v)]


def axiom_check(
    K: CourantData,
    seed: Optional[int] = None,
    max_degree: Optional[int] = None,
    random_sections: Optional[int] = None,
    workers: Optional[int] = None,
) -> StructureReport:
    """Leibniz, symmetrization, invariance and Jacobi on frame and random polynomial sections."""
    seed = CONFIG["sampling"]["seed"] if seed is None else seed
    max_degree = CONFIG["sampling"]["max_degree"] if max_degree is None else max_degree
    random_sections = CONFIG["sampling"]["random_sections"] if random_sections is None else random_sections
    workers = CONFIG["checks"]["workers"] if workers is None else workers
    n, m = K.n, K.m
    rng = np.random.default_rng(seed)
    frame = [frame_section(K, a) for a in range(1, m + 1)]
    randoms = [random_section(K, rng, max_degree) for _ in range(random_sections)]
    functions = [BasePolynomial.variable(i, n) for i in range(1, n + 1)]
    functions += [random_polynomial(n, rng, max_degree=max_degree, max_terms=2) for _ in range(2)]
    triples = CONFIG["checks"]["jacobi_random_triples"]
    random_triples = [
        tuple(random_section(K, rng, max_degree) for _ in range(3)) for _ in range(triples)
    ]
    named = [(f"e{a}", e) for a, e in enumerate(frame, start=1)]
    named += [(f"u{k}", u) for k, u in enumerate(randoms, start=1)]

    def leibniz() -> CheckResult:
        cases = []
        for (lu, u), (lv, v), f in cartesian(named, named[:m] or named, functions):
            cases.append((
                f"u = {lu}, v = {lv}, f = {f.render()}",
                lambda u=u, v=v, f=f: _sub(
                    dorfman(K, u, _scale_section(v, f)),
                    _add_sections(_scale_section(v, anchor_apply(K, u, f)), _scale_section(dorfman(K, u, v), f)),
                ),
            ))
        return _first_failure("leibniz", K.signature, cases)

    def symmetrization() -> CheckResult:
        half = Scalar(Fraction(1, 2))
        pairs = [(f"{lu} + {lv}", _add_sections(u, v)) for (lu, u), (lv, v) in cartesian(named[:m], named[:m])]
        cases = [
            (f"u = {lu}", lambda u=u: _sub(dorfman(K, u, u), [c.scale(half) for c in rho_star_d(K, metric_pairing(K, u, u))]))
            for lu, u in named + pairs
        ]
        return _first_failure("symmetrization", K.signature, cases)

    def invariance() -> CheckResult:
        cases = [
            (
                f"u = {lu}, v = {lv}",
                lambda u=u, v=v: anchor_apply(K, u, metric_pairing(K, v, v)) - metric_pairing(K, dorfman(K, u, v), v) * 2,
            )
            for (lu, u), (lv, v) in cartesian(named, named)
        ]
        return _first_failure("invariance", K.signature, cases)

    def jacobi_residual(u, v, w) -> Section:
        left = dorfman(K, u, dorfman(K, v, w))
        right = _add_sections(dorfman(K, dorfman(K, u, v), w), dorfman(K, v, dorfman(K, u, w)))
        return _sub(left, right)

    def jacobi_frame() -> CheckResult:
        cases = [
            (f"e{a}, e{b}, e{c}", lambda a=a, b=b, c=c: jacobi_residual(frame[a - 1], frame[b - 1], frame[c - 1]))
            for a, b, c in cartesian(range(1, m + 1), repeat=3)
        ]
        return _first_failure("jacobi (frame)", K.signature, cases)

    def jacobi_random() -> CheckResult:
        cases = [
            (f"random triple {k}", lambda t=t: jacobi_residual(*t))
            for k, t in enumerate(random_triples, start=1)
        ]
        return _first_failure("jacobi (random)", K.signature, cases)

    start_time = time.time()
    battery = [leibniz, symmetrization, invariance, jacobi_frame, jacobi_random]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda fn: fn(), battery))
    logger.info("axiom battery finished in %.2fs", time.time() - start_time)
    return StructureReport(title="Courant axioms", checks=results)

# src/geometry/bialgebroid.py
from __future__ import annotations

import concurrent.futures
import logging
import time
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.algebra.polynomials import BasePolynomial
from src.algebra.scalars import ONE, SQRT2, Scalar
from src.algebra.symbols import GradedFunction, ModelSignature, gf_product, merge_subsets, subsets
from src.config import CONFIG
from src.errors import DimensionError, DomainError, InputError
from src.geometry.aspinor import ASpinorOperator, Form, half_duality_signature, square_function
from src.geometry.courant import (
    BracketKey,
    CourantData,
    axiom_check,
    build_theta,
    derived_structure,
    master_equation,
)
from src.geometry.dirac import dirac_weyl
from src.states.schemas import CheckResult, StructureReport, check

logger = logging.getLogger(__name__)

HALF = Scalar(Fraction(1, 2))


def _poly(value, n: int) -> BasePolynomial:
    if isinstance(value, BasePolynomial):
        if value.n != n:
            raise DimensionError(f"Coefficient has {value.n} variables, expected {n}")
        return value
    return BasePolynomial.constant(Scalar.coerce(value), n)


# ===== Define the LieAlgebroidData class =====
class LieAlgebroidData(BaseModel):
    """Anchor and structure functions of a (candidate) Lie algebroid on a constant frame."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(ge=0, description="Base dimension")
    r: int = Field(ge=0, description="Rank")
    anchor: Tuple[Tuple[BasePolynomial, ...], ...] = Field(description="anchor[a-1][i-1] = ρ^i_a")
    structure: Dict[BracketKey, BasePolynomial] = Field(
        default_factory=dict, description="Structure functions keyed (b, c, a): [e_b, e_c] = C^a_bc e_a"
    )

    def __init__(self, **data):
        super().__init__(**data)
        self._validate()

    @field_validator("structure", mode="before")
    @classmethod
    def drop_zero_entries(cls, value):
        if isinstance(value, dict):
            return {tuple(k): v for k, v in value.items() if not (hasattr(v, "is_zero") and v.is_zero())}
        return value

    def _validate(self):
        n, r = self.n, self.r
        if len(self.anchor) != r:
            raise DimensionError(f"Anchor has {len(self.anchor)} rows, expected rank {r}")
        for a, row in enumerate(self.anchor, start=1):
            if len(row) != n or any(entry.n != n for entry in row):
                raise DimensionError(f"Anchor row {a} does not match base dimension {n}")
        for (b, c, a), value in self.structure.items():
            if not all(1 <= k <= r for k in (a, b, c)):
                raise DimensionError(f"Structure index ({b}, {c}, {a}) outside rank {r}")
            if value.n != n:
                raise DimensionError(f"Structure entry ({b}, {c}, {a}) has {value.n} variables, expected {n}")
            if value != -self.C(a, c, b):
                raise InputError(f"Structure functions are not skew: C^{a}_{b}{c} != -C^{a}_{c}{b}")

    @classmethod
    def build(
        cls,
        n: int,
        r: int,
        anchor: Optional[Sequence[Sequence]] = None,
        structure: Optional[Dict[BracketKey, object]] = None,
        complete_skew: bool = False,
    ) -> "LieAlgebroidData":
        """Coerce entries; with complete_skew, [e_c, e_b] is filled in from [e_b, e_c]."""
        if anchor is None:
            anchor = [[0] * n for _ in range(r)]
        rows = tuple(tuple(_poly(v, n) for v in row) for row in anchor)
        entries = {tuple(k): _poly(v, n) for k, v in (structure or {}).items()}
        if complete_skew:
            for (b, c, a), value in list(entries.items()):
                entries.setdefault((c, b, a), -value)
        return cls(n=n, r=r, anchor=rows, structure=entries)

    def rho(self, a: int, i: int) -> BasePolynomial:
        return self.anchor[a - 1][i - 1]

    def C(self, a: int, b: int, c: int) -> BasePolynomial:
        """C^a_bc."""
        return self.structure.get((b, c, a), BasePolynomial.zero(self.n))

    def __eq__(self, other):
        if not isinstance(other, LieAlgebroidData):
            return NotImplemented
        return (self.n, self.r, self.anchor, self.structure) == (other.n, other.r, other.anchor, other.structure)

    def __str__(self) -> str:
        lines = [f"📋 Lie algebroid (n={self.n}, r={self.r})"]
        for a in range(1, self.r + 1):
            for i in range(1, self.n + 1):
                if not self.rho(a, i).is_zero():
                    lines.append(f"  🔸 rho {a} {i}: {self.rho(a, i).render()}")
        for (b, c, a), value in sorted(self.structure.items()):
            lines.append(f"  🔸 structure {b} {c} {a}: {value.render()}")
        return "\n".join(lines)


def dual_zero(L: LieAlgebroidData) -> LieAlgebroidData:
    """Abelian dual with zero anchor."""
    return LieAlgebroidData.build(L.n, L.r)


def _check_pair(L: LieAlgebroidData, Lstar: LieAlgebroidData):
    if (L.n, L.r) != (Lstar.n, Lstar.r):
        raise InputError(f"Dual pair mismatch: (n, r) = ({L.n}, {L.r}) vs ({Lstar.n}, {Lstar.r})")


# ===== Define the AVectorField class =====
class AVectorField:
    """Vector field X^i ∂/∂x^i + X^a ∂/∂η^a on A[1] with form coefficients."""

    __slots__ = ("n", "r", "x_part", "eta_part")

    def __init__(self, n: int, r: int, x_part: Sequence[Form] | None = None, eta_part: Sequence[Form] | None = None):
        self.n = n
        self.r = r
        self.x_part = list(x_part) if x_part is not None else [Form.zero(n, r) for _ in range(n)]
        self.eta_part = list(eta_part) if eta_part is not None else [Form.zero(n, r) for _ in range(r)]
        if len(self.x_part) != n or len(self.eta_part) != r:
            raise DimensionError(f"Vector field needs {n} base and {r} fiber components")
        if any((f.n, f.r) != (n, r) for f in self.x_part + self.eta_part):
            raise DimensionError("Vector field components live on another algebroid")

    def operator(self) -> ASpinorOperator:
        n, r = self.n, self.r
        result = ASpinorOperator.zero(n, r)
        for i, coefficient in enumerate(self.x_part, start=1):
            if not coefficient.is_zero():
                result = result + ASpinorOperator.multiplication(coefficient).compose(ASpinorOperator.d_x(n, r, i))
        for a, coefficient in enumerate(self.eta_part, start=1):
            if not coefficient.is_zero():
                result = result + ASpinorOperator.multiplication(coefficient).compose(ASpinorOperator.d_eta(n, r, a))
        return result

    def divergence(self) -> Form:
        """Σ ∂_i X^i + Σ (-1)^k ∂_a X^a_k over the η-degree k parts of X^a."""
        total = Form.zero(self.n, self.r)
        for i, coefficient in enumerate(self.x_part, start=1):
            total = total + coefficient.partial_x(i)
        for a, coefficient in enumerate(self.eta_part, start=1):
            for k in range(self.r + 1):
                part = coefficient.degree_part(k).partial_eta(a)
                total = total + (part if k % 2 == 0 else -part)
        return total

    def __repr__(self):
        pieces = [f"({c.render()})*d{i}" for i, c in enumerate(self.x_part, start=1) if not c.is_zero()]
        pieces += [f"({c.render()})*de{a}" for a, c in enumerate(self.eta_part, start=1) if not c.is_zero()]
        return f"AVectorField({' + '.join(pieces) or '0'})"


def lie_derivative(X: AVectorField) -> ASpinorOperator:
    """Lie derivative on half-Berezinian sections in the reference trivialization: X + ½ div X."""
    return X.operator() + ASpinorOperator.multiplication(X.divergence()).scale(HALF)


def _lift_form(form: Form, sig: ModelSignature, offset: int) -> GradedFunction:
    """η^B -> (√2)^{|B|} ξ_{offset+B}."""
    zero = (0,) * sig.n
    terms = {}
    for subset, coef in form.terms.items():
        terms[(tuple(offset + a for a in subset), zero)] = coef.scale(SQRT2 ** len(subset))
    return GradedFunction(sig, terms)


def hamiltonian_lift(X: AVectorField, dual: bool = False) -> GradedFunction:
    """Pullback of F_X = X^i p_i + X^a θ_a to the double, with its √2-scaled odd coordinates.

    For a field on A[1] the odd coordinates go to ξ_{r+a} and the fiber momenta to ξ_a;
    dual=True exchanges the two blocks for a field on A*[1].
    """
    n, r = X.n, X.r
    sig = half_duality_signature(n, r)
    odd_offset, momentum_offset = (0, r) if dual else (r, 0)
    result = GradedFunction.zero(sig)
    for i, coefficient in enumerate(X.x_part, start=1):
        if not coefficient.is_zero():
            result = result + gf_product(_lift_form(coefficient, sig, odd_offset), GradedFunction.p(sig, i))
    for a, coefficient in enumerate(X.eta_part, start=1):
        if not coefficient.is_zero():
            momentum = GradedFunction.xi(sig, momentum_offset + a).scale(SQRT2)
            result = result + gf_product(_lift_form(coefficient, sig, odd_offset), momentum)
    return result


# ===== Homological fields and modular cocycles =====
def homological_field(L: LieAlgebroidData) -> AVectorField:
    """ρ^i_a η^a ∂/∂x^i + ½ C^a_bc η^c η^b ∂/∂η^a."""
    n, r = L.n, L.r
    x_part = [Form.linear(n, r, [L.rho(a, i) for a in range(1, r + 1)]) for i in range(1, n + 1)]
    eta_part = []
    for a in range(1, r + 1):
        total = Form.zero(n, r)
        for (b, c, target), value in L.structure.items():
            if target == a:
                total = total + (Form.eta(n, r, c) * Form.eta(n, r, b)) * value.scale(HALF)
        eta_part.append(total)
    return AVectorField(n, r, x_part, eta_part)


def homological_Q(L: LieAlgebroidData) -> ASpinorOperator:
    return homological_field(L).operator()


def modular_cocycle(L: LieAlgebroidData) -> List[BasePolynomial]:
    """(η₀)_b = Σ_i ∂_i ρ^i_b + Σ_a C^a_ba."""
    cocycle = []
    for b in range(1, L.r + 1):
        total = BasePolynomial.zero(L.n)
        for i in range(1, L.n + 1):
            total = total + L.rho(b, i).partial(i)
        for a in range(1, L.r + 1):
            total = total + L.C(a, b, a)
        cocycle.append(total)
    return cocycle


def lie_Q(L: LieAlgebroidData) -> ASpinorOperator:
    """Lie derivative along Q; equals Q + ½η₀∧."""
    return lie_derivative(homological_field(L))


# ===== Q̂*, the dual field transported through v♯ =====
def _complement(subset, r: int):
    return tuple(a for a in range(1, r + 1) if a not in subset)


def _qhat_on_constant(Lstar: LieAlgebroidData, dual_q: ASpinorOperator, form: Form, scale: Scalar) -> Form:
    """(-1)^k (v♯)^{-1} Q* v♯ on a form, k-homogeneous part by part."""
    n, r = Lstar.n, Lstar.r
    result = Form.zero(n, r)
    for subset, coef in form.terms.items():
        k = len(subset)
        complement = _complement(subset, r)
        sign, _ = merge_subsets(subset, complement)
        image = dual_q.apply(Form(n, r, {complement: coef.scale(scale * sign)}))
        for wedge, value in image.terms.items():
            rest = _complement(wedge, r)
            back_sign, _ = merge_subsets(rest, wedge)
            term = Form(n, r, {rest: value.scale(scale.inv() * back_sign)})
            result = result + (term if k % 2 == 0 else -term)
    return result


def qhat_star(Lstar: LieAlgebroidData, scale=ONE) -> ASpinorOperator:
    """Q̂* for the top section v = scale·ζ_1∧...∧ζ_r, as an operator on O(A[1])."""
    scale = Scalar.coerce(scale)
    if scale.is_zero():
        raise InputError("The reference top section must not vanish")
    n, r = Lstar.n, Lstar.r
    dual_q = homological_Q(Lstar)

    def action(form: Form) -> Form:
        return _qhat_on_constant(Lstar, dual_q, form, scale)

    result = ASpinorOperator.from_basis_action(n, r, action)
    for i in range(1, n + 1):
        x = BasePolynomial.variable(i, n)

        def commutator_action(form: Form, x=x) -> Form:
            return action(form * x) - action(form) * x

        first_order = ASpinorOperator.from_basis_action(n, r, commutator_action)
        result = result + first_order.compose(ASpinorOperator.d_x(n, r, i))
    return result


# ===== The double and its generating operator =====
def double(L: LieAlgebroidData, Lstar: LieAlgebroidData) -> CourantData:
    """A ⊕ A* with the ½-duality pairing; frame (ζ_1..ζ_r, η^1..η^r)."""
    _check_pair(L, Lstar)
    n, r = L.n, L.r
    anchor = [list(row) for row in L.anchor] + [list(row) for row in Lstar.anchor]
    bracket: Dict[BracketKey, BasePolynomial] = {}

    def put(key, value):
        if not value.is_zero():
            bracket[key] = bracket[key] + value if key in bracket else value

    for (b, c, a), value in L.structure.items():
        put((b, c, a), value)
    for (b, c, a), value in Lstar.structure.items():
        put((r + b, r + c, r + a), value)
    for a in range(1, r + 1):
        for b in range(1, r + 1):
            for c in range(1, r + 1):
                # ⟦ζ_a, η^b⟧ = Cs^a_bc ζ_c + C^b_ca η^c, and ⟦η^b, ζ_a⟧ is its negative
                put((a, r + b, c), Lstar.C(a, b, c))
                put((a, r + b, r + c), L.C(b, c, a))
                put((r + b, a, c), -Lstar.C(a, b, c))
                put((r + b, a, r + c), -L.C(b, c, a))
    return CourantData.build(half_duality_signature(n, r), anchor, bracket)


def double_theta(L: LieAlgebroidData, Lstar: LieAlgebroidData) -> Tuple[CourantData, GradedFunction]:
    """Θ = √2·(F_Q + F_Q*) from the two Hamiltonian lifts, and the structure it derives."""
    _check_pair(L, Lstar)
    theta = (hamiltonian_lift(homological_field(L)) + hamiltonian_lift(homological_field(Lstar), dual=True)).scale(SQRT2)
    logger.debug("double Θ has %d terms", len(theta.terms))
    return derived_structure(theta), theta


def bialg_operator(L: LieAlgebroidData, Lstar: LieAlgebroidData) -> ASpinorOperator:
    """W = Q - Q̂* + ½η₀ + ½γ(ζ₀) with γ(ζ_b) = ∂/∂η^b."""
    _check_pair(L, Lstar)
    n, r = L.n, L.r
    zeta0 = modular_cocycle(Lstar)
    gamma = ASpinorOperator.zero(n, r)
    for b, value in enumerate(zeta0, start=1):
        if not value.is_zero():
            gamma = gamma + value * ASpinorOperator.d_eta(n, r, b)
    return lie_Q(L) - qhat_star(Lstar) + gamma.scale(HALF)


def bialg_invariant(L: LieAlgebroidData, Lstar: LieAlgebroidData) -> BasePolynomial:
    """2·W², defined when the square is a base function."""
    return square_function(bialg_operator(L, Lstar)).scale(2)


def bialg_invariant_formula(L: LieAlgebroidData, Lstar: LieAlgebroidData) -> BasePolynomial:
    """½⟨ζ₀, η₀⟩ - Q̂*(η₀)."""
    _check_pair(L, Lstar)
    n, r = L.n, L.r
    eta0, zeta0 = modular_cocycle(L), modular_cocycle(Lstar)
    pairing = BasePolynomial.zero(n)
    for z, e in zip(zeta0, eta0):
        pairing = pairing + z * e
    image = qhat_star(Lstar).apply(Form.linear(n, r, eta0))
    if any(subset for subset in image.terms):
        raise DomainError(f"Q̂*(η₀) is not a function: {image.render()}")
    return pairing.scale(HALF) - image.function_part()


def bialg_check(
    L: LieAlgebroidData, Lstar: LieAlgebroidData, seed: Optional[int] = None, workers: Optional[int] = None
) -> StructureReport:
    """Three equivalent bialgebroid criteria plus the homological conditions on each side."""
    _check_pair(L, Lstar)
    workers = CONFIG["checks"]["workers"] if workers is None else workers
    K, theta = double_theta(L, Lstar)

    def q_square() -> CheckResult:
        Q = homological_Q(L)
        return check("Q^2 = 0 on A", Q.compose(Q))

    def dual_q_square() -> CheckResult:
        Q = homological_Q(Lstar)
        return check("Q^2 = 0 on A*", Q.compose(Q))

    def double_axioms() -> CheckResult:
        report = axiom_check(K, seed=seed, workers=1)
        failures = report.failures()
        if not failures:
            return CheckResult(name="Courant axioms on the double", passed=True)
        first = failures[0]
        return CheckResult(
            name="Courant axioms on the double", passed=False, witness=first.witness, detail=f"{first.name}: {first.detail}"
        )

    def master() -> CheckResult:
        return check("master equation {Θ,Θ} = 0", master_equation(theta))

    def square() -> CheckResult:
        W = bialg_operator(L, Lstar)
        S = W.compose(W)
        residual = S - ASpinorOperator.function(L.n, L.r, S.scalar_part())
        return check("W^2 is a base function", residual)

    def dorfman_double() -> CheckResult:
        return check("lifted Θ matches the Dorfman double", build_theta(double(L, Lstar)) - theta)

    def splitting() -> CheckResult:
        D = ASpinorOperator.from_spinor_operator(dirac_weyl(theta), L.r)
        return check("D = √2·W on ∧A*", D - bialg_operator(L, Lstar).scale(SQRT2))

    start_time = time.time()
    battery = [q_square, dual_q_square, double_axioms, master, square, dorfman_double, splitting]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda fn: fn(), battery))
    criteria = [results[2].passed, results[3].passed, results[4].passed]
    results.append(
        CheckResult(
            name="three criteria agree",
            passed=len(set(criteria)) == 1,
            witness="" if len(set(criteria)) == 1 else f"axioms={criteria[0]}, master={criteria[1]}, square={criteria[2]}",
        )
    )
    logger.info("bialgebroid battery finished in %.2fs", time.time() - start_time)
    return StructureReport(title="Lie bialgebroid", checks=results)

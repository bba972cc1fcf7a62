# src/cli/runner.py
from __future__ import annotations

import logging
import math
import os.path as osp
import time
from typing import Callable, Dict, Optional

from pydantic import BaseModel, Field

from src.algebra.operators import SpinorOperator, adjoint, order, principal_symbol
from src.algebra.symbols import gf_product, poisson
from src.algebra.weyl import dequantize, quantize, star
from src.cli.expression import parse_operator, parse_symbol
from src.cli.model_file import ModelFile
from src.config import CONFIG
from src.errors import DomainError, InputError, UnsupportedError
from src.geometry.bialgebroid import (
    bialg_check,
    bialg_invariant,
    bialg_invariant_formula,
    double_theta,
    modular_cocycle,
)
from src.geometry.courant import axiom_check, build_theta, derived_structure, master_equation
from src.geometry.dirac import (
    derived_commutator,
    dirac_explicit,
    dirac_square,
    dirac_weyl,
    fE_from_square,
    invariant_fE,
)
from src.states.schemas import CheckResult, Report, check

logger = logging.getLogger(__name__)

COMMANDS = ("check", "theta", "dirac", "invariant", "star", "symbol", "bialg-check", "bialg-invariant")


# ===== Define the run options =====
class RunOptions(BaseModel):
    """Command arguments beyond the model file"""
    seed: Optional[int] = Field(default=None, ge=0, description="Seed for the randomized checks")
    max_degree: Optional[int] = Field(default=None, ge=0, description="Degree of random polynomial sections")
    workers: Optional[int] = Field(default=None, ge=1, description="Threads for the check batteries")
    left: Optional[str] = Field(default=None, description="Left symbol for star")
    right: Optional[str] = Field(default=None, description="Right symbol for star")
    operator: Optional[str] = Field(default=None, description="Operator expression for symbol")


def _render_order(value: float) -> str:
    return "-inf" if value == -math.inf else str(int(value))


def _render_vector(values) -> str:
    return "(" + ", ".join(v.render() for v in values) + ")"


def _require(options: RunOptions, *names: str):
    missing = [name for name in names if getattr(options, name) is None]
    if missing:
        raise InputError("Missing option(s): " + ", ".join(f"--{name}" for name in missing))


# ===== Define the CommandRunner class =====
class CommandRunner:
    """Dispatches one command against a parsed model and collects a Report."""

    def __init__(self, model: ModelFile, options: Optional[RunOptions] = None, model_name: str = ""):
        self.model = model
        self.options = options or RunOptions()
        self.model_name = model_name
        self.seed = self.options.seed if self.options.seed is not None else CONFIG["sampling"]["seed"]
        self.commands: Dict[str, Callable[[Report], None]] = {
            "check": self.check,
            "theta": self.theta,
            "dirac": self.dirac,
            "invariant": self.invariant,
            "star": self.star,
            "symbol": self.symbol,
            "bialg-check": self.bialg_check,
            "bialg-invariant": self.bialg_invariant,
        }

    def __call__(self, command: str) -> Report:
        if command not in self.commands:
            raise InputError(f"Unknown command '{command}'; expected one of {', '.join(COMMANDS)}")
        if command.startswith("bialg") and self.model.kind == "courant":
            raise UnsupportedError(f"'{command}' needs a lie_algebroid or bialgebroid_pair model")
        report = Report(command=command, model=self.model_name, kind=self.model.kind, seed=self.seed)
        start_time = time.time()
        self.commands[command](report)
        logger.info("%s finished in %.2fs", command, time.time() - start_time)
        return report

    # ----- Courant commands -----
    def check(self, report: Report):
        K = self.model.courant_data()
        battery = axiom_check(K, seed=self.seed, max_degree=self.options.max_degree, workers=self.options.workers)
        theta = build_theta(K)
        report.add_checks(battery.checks + [check("master equation {Θ,Θ} = 0", master_equation(theta))])

    def theta(self, report: Report):
        K = self.model.courant_data()
        theta = build_theta(K)
        report.add_value("theta", theta)
        report.add_checks([CheckResult(name="derived structure round trip", passed=derived_structure(theta) == K)])

    def dirac(self, report: Report):
        K = self.model.courant_data()
        D = dirac_weyl(build_theta(K))
        explicit = dirac_explicit(K)
        square, degree = dirac_square(D)
        report.add_value("dirac (weyl)", D)
        report.add_value("dirac (explicit)", explicit)
        report.add_value("square", square)
        report.add_value("square order", _render_order(degree))
        checks = [
            check("weyl and explicit paths agree", D - explicit),
            check("skew-symmetric D* = -D", adjoint(D) + D),
        ]
        if not D.is_zero():
            checks.append(
                CheckResult(name="derived commutator reproduces the structure", passed=derived_commutator(D) == K)
            )
        report.add_checks(checks)

    def invariant(self, report: Report):
        K = self.model.courant_data()
        fE = invariant_fE(K)
        report.add_value("f_E", fE)
        if K.m % 2:
            logger.info("odd rank %d: skipping the spinor path", K.m)
            return
        D = dirac_weyl(build_theta(K))
        square, _ = dirac_square(D)
        if not square.is_multiplication():
            residual = square - SpinorOperator.function(square.sig, square.scalar_part())
            report.add_checks([check("D^2 is a function", residual)])
            return
        from_square = fE_from_square(D)
        report.add_value("-8 D^2", from_square)
        report.add_checks([check("f_E = -8 D^2", fE - from_square)])

    def star(self, report: Report):
        _require(self.options, "left", "right")
        sig = self.model.courant_data().signature
        F, G = parse_symbol(self.options.left, sig), parse_symbol(self.options.right, sig)
        expansion = star(F, G)
        for k, component in expansion.items():
            report.add_value(f"B{2 * k}", component)
        report.add_checks([
            check("B0 = product", expansion.get(0, sig) - gf_product(F, G)),
            check("B2 = Poisson bracket", expansion.get(1, sig) - poisson(F, G)),
        ])

    def symbol(self, report: Report):
        _require(self.options, "operator")
        sig = self.model.courant_data().signature
        operator = parse_operator(self.options.operator, sig)
        if operator.is_zero():
            raise DomainError("The zero operator has no principal symbol")
        symbol = dequantize(operator)
        report.add_value("principal symbol", principal_symbol(operator))
        report.add_value("order", _render_order(order(operator)))
        report.add_value("weyl symbol", symbol)
        report.add_checks([check("quantization round trip", quantize(symbol) - operator)])

    # ----- bialgebroid commands -----
    def bialg_check(self, report: Report):
        L, Lstar = self.model.pair()
        report.add_value("eta0", _render_vector(modular_cocycle(L)))
        report.add_value("zeta0", _render_vector(modular_cocycle(Lstar)))
        report.add_checks(bialg_check(L, Lstar, seed=self.seed, workers=self.options.workers).checks)

    def bialg_invariant(self, report: Report):
        L, Lstar = self.model.pair()
        value = bialg_invariant(L, Lstar)
        formula = bialg_invariant_formula(L, Lstar)
        K, _ = double_theta(L, Lstar)
        fE = invariant_fE(K)
        report.add_value("2 W^2", value)
        report.add_value("1/2 <zeta0, eta0> - Qhat*(eta0)", formula)
        report.add_value("f_E", fE)
        report.add_checks([
            check("both paths agree", value - formula),
            check("2 W^2 = -f_E/8", value.scale(-8) - fE),
        ])


def run(command: str, model: ModelFile, options: Optional[RunOptions] = None, model_path: str = "") -> Report:
    """Run one command; EngineErrors propagate to the caller."""
    runner = CommandRunner(model, options, model_name=osp.basename(model_path))
    return runner(command)


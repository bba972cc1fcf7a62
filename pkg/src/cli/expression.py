# src/cli/expression.py
from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from typing import Callable, Dict, Optional

from pyparsing import (
    Forward,
    Literal,
    ParseBaseException,
    ParserElement,
    Regex,
    Word,
    Opt,
    ZeroOrMore,
    col as pp_col,
    lineno as pp_lineno,
    nums,
)

from src.algebra.operators import SpinorOperator
from src.algebra.polynomials import BasePolynomial
from src.algebra.scalars import I, SQRT2, Scalar
from src.algebra.symbols import GradedFunction, ModelSignature
from src.errors import ModelParseError
from src.geometry.aspinor import ASpinorOperator

NAME = re.compile(r"([A-Za-z]+)(\d*)$")


# ===== Define the expression contexts =====
class ExpressionContext:
    """Where an expression is evaluated: its constants and its named generators."""

    kind = "expression"

    def __init__(self, variables: Dict[str, Callable[[int], object]], constant: Callable[[Scalar], object]):
        self.variables = variables
        self.constant = constant

    def variable(self, name: str):
        match = NAME.match(name)
        if name == "sqrt2":
            return self.constant(SQRT2)
        if name == "I":
            return self.constant(I)
        if not match or not match.group(2) or match.group(1) not in self.variables:
            raise KeyError(name)
        return self.variables[match.group(1)](int(match.group(2)))

    def one(self):
        return self.constant(Scalar(1))


def _indexed(limit: int, make: Callable[[int], object]) -> Callable[[int], object]:
    def build(index: int):
        if not 1 <= index <= limit:
            raise KeyError(index)
        return make(index)

    return build


def polynomial_context(n: int) -> ExpressionContext:
    return ExpressionContext(
        {"x": _indexed(n, lambda i: BasePolynomial.variable(i, n))},
        lambda s: BasePolynomial.constant(s, n),
    )


def symbol_context(sig: ModelSignature) -> ExpressionContext:
    return ExpressionContext(
        {
            "x": _indexed(sig.n, lambda i: GradedFunction.x(sig, i)),
            "xi": _indexed(sig.m, lambda a: GradedFunction.xi(sig, a)),
            "p": _indexed(sig.n, lambda i: GradedFunction.p(sig, i)),
        },
        lambda s: GradedFunction.function(sig, s),
    )


def operator_context(sig: ModelSignature) -> ExpressionContext:
    """`*` is composition, read left to right."""
    return ExpressionContext(
        {
            "x": _indexed(sig.n, lambda i: SpinorOperator.function(sig, BasePolynomial.variable(i, sig.n))),
            "c": _indexed(sig.m, lambda a: SpinorOperator.generator(sig, a)),
            "d": _indexed(sig.n, lambda i: SpinorOperator.derivative(sig, i)),
        },
        lambda s: SpinorOperator.function(sig, s),
    )


def aspinor_context(n: int, r: int) -> ExpressionContext:
    return ExpressionContext(
        {
            "x": _indexed(n, lambda i: ASpinorOperator.function(n, r, BasePolynomial.variable(i, n))),
            "eta": _indexed(r, lambda a: ASpinorOperator.eta(n, r, a)),
            "de": _indexed(r, lambda a: ASpinorOperator.d_eta(n, r, a)),
            "d": _indexed(n, lambda i: ASpinorOperator.d_x(n, r, i)),
        },
        lambda s: ASpinorOperator.function(n, r, s),
    )


# ===== Define the grammar =====
def make_grammar(context: ExpressionContext) -> ParserElement:
    """
    number  :: digits ['/' digits]
    name    :: letters digits* (sqrt2 | I | x<i> | xi<a> | p<i> | c<a> | d<i> | eta<a> | de<a>)
    atom    :: number | name | '(' expr ')'
    power   :: atom ['^' digits]
    unary   :: ('+' | '-')* power
    term    :: unary (('*' unary) | ('/' number))*
    expr    :: term (('+' | '-') term)*
    """
    expr = Forward()
    number = Regex(r"\d+(/\d+)?")
    name = Regex(r"[A-Za-z]+\d*")
    lpar, rpar = Literal("(").suppress(), Literal(")").suppress()

    def to_number(s, loc, toks):
        try:
            return [Scalar(Fraction(toks[0]))]
        except ZeroDivisionError:
            raise ModelParseError("Division by zero", line=pp_lineno(loc, s), column=pp_col(loc, s)) from None

    def to_constant(s, loc, toks):
        return [context.constant(toks[0])]

    def to_variable(s, loc, toks):
        try:
            return [context.variable(toks[0])]
        except KeyError:
            raise ModelParseError(f"Unknown variable '{toks[0]}'", line=pp_lineno(loc, s), column=pp_col(loc, s))

    divisor = number.copy().set_parse_action(to_number)
    atom = number.copy().set_parse_action(to_number, to_constant) | name.set_parse_action(to_variable) | (lpar + expr + rpar)
    power = atom + Opt(Literal("^") + Word(nums))
    unary = ZeroOrMore(Literal("-") | Literal("+")) + power
    term = unary + ZeroOrMore((Literal("*") + unary) | (Literal("/") + divisor))

    def fold_power(toks):
        base = toks[0]
        if len(toks) == 1:
            return [base]
        return [reduce(lambda acc, _: acc * base, range(int(toks[2])), context.one())]

    def fold_unary(toks):
        value = toks[-1]
        negations = sum(1 for t in toks[:-1] if t == "-")
        return [-value if negations % 2 else value]

    def fold_term(s, loc, toks):
        value = toks[0]
        for op, operand in zip(toks[1::2], toks[2::2]):
            if op == "*":
                value = value * operand
            else:
                if operand.is_zero():
                    raise ModelParseError("Division by zero", line=pp_lineno(loc, s), column=pp_col(loc, s))
                value = value.scale(operand.inv())
        return [value]

    def fold_expr(toks):
        value = toks[0]
        for op, operand in zip(toks[1::2], toks[2::2]):
            value = value + operand if op == "+" else value - operand
        return [value]

    power.set_parse_action(fold_power)
    unary.set_parse_action(fold_unary)
    term.set_parse_action(fold_term)
    expr <<= term + ZeroOrMore((Literal("+") | Literal("-")) + term)
    expr.set_parse_action(fold_expr)
    return expr


def parse_expression(
    text: str,
    context: ExpressionContext,
    line: Optional[int] = None,
    column_offset: int = 0,
):
    """Evaluate `text` in `context`; syntax errors carry line and column."""
    grammar = make_grammar(context)
    try:
        return grammar.parse_string(text, parse_all=True)[0]
    except ParseBaseException as e:
        raise ModelParseError(
            f"Cannot parse expression '{text.strip()}': {e.msg}",
            line=line if line is not None else e.lineno,
            column=column_offset + e.col,
        ) from None
    except ModelParseError as e:
        if line is not None:
            raise ModelParseError(e.reason, line=line, column=column_offset + (e.column or 1)) from None
        raise


def parse_polynomial(text: str, n: int, line: Optional[int] = None, column_offset: int = 0) -> BasePolynomial:
    return parse_expression(text, polynomial_context(n), line, column_offset)


def parse_symbol(text: str, sig: ModelSignature) -> GradedFunction:
    return parse_expression(text, symbol_context(sig))


def parse_operator(text: str, sig: ModelSignature) -> SpinorOperator:
    return parse_expression(text, operator_context(sig))


def parse_aspinor(text: str, n: int, r: int) -> ASpinorOperator:
    return parse_expression(text, aspinor_context(n, r))

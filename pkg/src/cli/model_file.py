# src/cli/model_file.py
from __future__ import annotations

import logging
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
from pyparsing import (
    Group,
    OneOrMore,
    ParseBaseException,
    Regex,
    StringEnd,
    Suppress,
    Word,
    alphanums,
    nums,
    one_of,
)

from src.algebra.clifford import WittFrame, default_witt_frame
from src.algebra.polynomials import BasePolynomial
from src.algebra.scalars import Scalar
from src.algebra.symbols import ModelSignature
from src.cli.expression import parse_polynomial
from src.errors import DimensionError, InputError, ModelParseError, UnsupportedError
from src.geometry.bialgebroid import LieAlgebroidData, double_theta, dual_zero
from src.geometry.courant import CourantData

logger = logging.getLogger(__name__)

ModelKind = Literal["courant", "lie_algebroid", "bialgebroid_pair"]

ENTRY_ARITY = {"anchor": 2, "bracket": 3, "structure": 3, "dual_anchor": 2, "dual_structure": 3}
ENTRIES_BY_KIND = {
    "courant": {"anchor", "bracket"},
    "lie_algebroid": {"anchor", "structure"},
    "bialgebroid_pair": {"anchor", "structure", "dual_anchor", "dual_structure"},
}


# ===== Define the line grammar =====
def make_line_grammar():
    """
    header :: ('kind' | 'base_dim' | 'fiber_rank' | 'rank') ':' word
    block  :: ('metric' | 'witt_frame') ':'
    entry  :: ('anchor' | 'bracket' | 'structure' | 'dual_anchor' | 'dual_structure') int+ ':' expression
    """
    integer = Word(nums).set_parse_action(lambda t: int(t[0]))
    header = one_of("kind base_dim fiber_rank rank", as_keyword=True)("key") + Suppress(":") + Word(alphanums + "_")("value")
    block = one_of("metric witt_frame", as_keyword=True)("block") + Suppress(":")
    entry = (
        one_of(list(ENTRY_ARITY), as_keyword=True)("key")
        + Group(OneOrMore(integer))("indices")
        + Suppress(":")
        + Regex(r"\S.*")("expression")
    )
    return (block + StringEnd()) | (header + StringEnd()) | (entry + StringEnd())


LINE_GRAMMAR = make_line_grammar()


# ===== Define the model file structure =====
class ModelEntry(BaseModel):
    """One `key indices: expression` line."""
    key: str = Field(description="anchor, bracket, structure, dual_anchor or dual_structure")
    indices: Tuple[int, ...] = Field(description="1-based indices as written")
    expression: str = Field(description="Coefficient expression text")
    line: int = Field(description="Line number in the model file")
    column: int = Field(description="Column where the expression starts")


class ModelFile(BaseModel):
    """Parsed model file; build the algebraic data with courant_data() or pair()."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: ModelKind = Field(description="courant, lie_algebroid or bialgebroid_pair")
    base_dim: int = Field(ge=0, description="Base dimension n")
    rank: int = Field(ge=0, description="Fiber rank m (courant) or algebroid rank r")
    metric: Optional[Tuple[Tuple[Scalar, ...], ...]] = Field(default=None, description="Constant metric, courant only")
    witt_frame: Optional[Tuple[Tuple[Scalar, ...], ...]] = Field(
        default=None, description="Rows e_1..e_k followed by f_1..f_k"
    )
    entries: List[ModelEntry] = Field(default_factory=list, description="Coefficient entries in file order")

    def _coefficients(self, key: str) -> Dict[Tuple[int, ...], BasePolynomial]:
        bound = self.rank
        values: Dict[Tuple[int, ...], BasePolynomial] = {}
        for entry in self.entries:
            if entry.key != key:
                continue
            if key.endswith("anchor"):
                a, i = entry.indices
                if not (1 <= a <= bound and 1 <= i <= self.base_dim):
                    raise DimensionError(f"Anchor index ({a}, {i}) out of range on line {entry.line}")
            elif not all(1 <= k <= bound for k in entry.indices):
                raise DimensionError(f"{key} index {entry.indices} outside rank {bound} on line {entry.line}")
            values[entry.indices] = parse_polynomial(entry.expression, self.base_dim, entry.line, entry.column - 1)
        return values

    def _anchor(self, key: str) -> List[List[BasePolynomial]]:
        rows = [[BasePolynomial.zero(self.base_dim) for _ in range(self.base_dim)] for _ in range(self.rank)]
        for (a, i), value in self._coefficients(key).items():
            rows[a - 1][i - 1] = value
        return rows

    def signature(self) -> ModelSignature:
        return self.courant_data().signature

    def courant_data(self) -> CourantData:
        """The Courant algebroid; Lie algebroid kinds go through their double."""
        if self.kind != "courant":
            K, _ = double_theta(*self.pair())
            return K
        if self.metric is None:
            raise ModelParseError("A courant model needs a metric block")
        signature = ModelSignature(self.base_dim, self.rank, self.metric)
        return CourantData.build(signature, self._anchor("anchor"), self._coefficients("bracket"))

    def pair(self) -> Tuple[LieAlgebroidData, LieAlgebroidData]:
        """(A, A*); a lie_algebroid model is paired with the abelian dual."""
        if self.kind == "courant":
            raise UnsupportedError("Bialgebroid commands need a lie_algebroid or bialgebroid_pair model")
        n, r = self.base_dim, self.rank
        L = LieAlgebroidData.build(n, r, self._anchor("anchor"), self._coefficients("structure"), complete_skew=True)
        if self.kind == "lie_algebroid":
            return L, dual_zero(L)
        Lstar = LieAlgebroidData.build(
            n, r, self._anchor("dual_anchor"), self._coefficients("dual_structure"), complete_skew=True
        )
        return L, Lstar

    def frame(self) -> WittFrame:
        """Supplied Witt frame, or the default one for the metric."""
        signature = self.signature()
        if self.witt_frame is None:
            return default_witt_frame(signature)
        half = len(self.witt_frame) // 2
        return WittFrame(signature, self.witt_frame[:half], self.witt_frame[half:])

    def __str__(self) -> str:
        model_str = [f"📋 {self.kind} model (base_dim={self.base_dim}, rank={self.rank})"]
        model_str.extend(f"  🔸 {e.key} {' '.join(map(str, e.indices))}: {e.expression}" for e in self.entries)
        return "\n".join(model_str)


# ===== Parsing =====
def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _scalar_row(text: str, number: int) -> Tuple[Scalar, ...]:
    row = []
    offset = 0
    for token in text.split():
        offset = text.index(token, offset)
        row.append(parse_polynomial(token, 0, number, offset).constant_value())
        offset += len(token)
    return tuple(row)


def parse_model(text: str) -> ModelFile:
    """Parse and validate a model file; raises ModelParseError with the offending line."""
    headers: Dict[str, str] = {}
    blocks: Dict[str, List[Tuple[Scalar, ...]]] = {}
    entries: List[ModelEntry] = []
    seen: Dict[Tuple[str, Tuple[int, ...]], int] = {}
    current_block: Optional[str] = None

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if current_block is not None:
            if line.strip() == "end":
                current_block = None
            else:
                blocks[current_block].append(_scalar_row(line, number))
            continue
        try:
            parsed = LINE_GRAMMAR.parse_string(line.strip(), parse_all=True)
        except ParseBaseException as e:
            indent = len(line) - len(line.lstrip())
            raise ModelParseError(f"Unrecognized line '{line.strip()}'", line=number, column=indent + e.col) from None
        if "block" in parsed:
            current_block = parsed["block"]
            if current_block in blocks:
                raise ModelParseError(f"Duplicate {current_block} block", line=number, column=1)
            blocks[current_block] = []
        elif "value" in parsed:
            key = "rank" if parsed["key"] == "fiber_rank" else parsed["key"]
            if key in headers:
                raise ModelParseError(f"Duplicate header '{key}'", line=number, column=1)
            headers[key] = parsed["value"]
        else:
            key, indices = parsed["key"], tuple(parsed["indices"])
            if len(indices) != ENTRY_ARITY[key]:
                raise ModelParseError(f"'{key}' takes {ENTRY_ARITY[key]} indices, got {len(indices)}", line=number, column=1)
            if (key, indices) in seen:
                raise ModelParseError(f"Duplicate entry {key} {indices}, first on line {seen[(key, indices)]}", line=number, column=1)
            seen[(key, indices)] = number
            colon = line.index(":")
            after = line[colon + 1:]
            column = colon + 2 + len(after) - len(after.lstrip())
            entries.append(ModelEntry(key=key, indices=indices, expression=parsed["expression"], line=number, column=column))

    if current_block is not None:
        raise ModelParseError(f"Block '{current_block}' is not closed with 'end'")
    for required in ("kind", "base_dim", "rank"):
        if required not in headers:
            raise ModelParseError(f"Missing header '{required}'")
    kind = headers["kind"]
    if kind not in ENTRIES_BY_KIND:
        raise ModelParseError(f"Unknown model kind '{kind}'")
    for entry in entries:
        if entry.key not in ENTRIES_BY_KIND[kind]:
            raise ModelParseError(f"'{entry.key}' entries are not allowed in a {kind} model", line=entry.line, column=1)
    if "metric" in blocks and kind != "courant":
        raise ModelParseError("Only courant models carry a metric block; doubles use the duality pairing")
    try:
        base_dim, rank = int(headers["base_dim"]), int(headers["rank"])
    except ValueError:
        raise ModelParseError("base_dim and rank must be integers") from None
    if base_dim < 0 or rank < 0:
        raise DimensionError(f"Dimensions must be non-negative, got base_dim={base_dim}, rank={rank}")

    model = ModelFile(
        kind=kind,
        base_dim=base_dim,
        rank=rank,
        metric=tuple(blocks["metric"]) if "metric" in blocks else None,
        witt_frame=tuple(blocks["witt_frame"]) if "witt_frame" in blocks else None,
        entries=entries,
    )
    # structural validation: dimensions, metric, skewness
    model.courant_data()
    logger.debug("parsed %s model with %d entries", kind, len(entries))
    return model


def load_model(path: str) -> ModelFile:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"Cannot read model file '{path}': {e.strerror}") from None
    return parse_model(text)


if __name__ == "__main__":
    sample = """
kind: lie_algebroid
base_dim: 1
rank: 1
anchor 1 1: x1
"""
    try:
        model = parse_model(sample)
        L, Lstar = model.pair()
        assert L.rho(1, 1) == BasePolynomial.variable(1, 1)
        print(f"✅ model file self-check passed\n{model}")
    except Exception as e:
        print(f"❌ model file self-check failed: {e}")

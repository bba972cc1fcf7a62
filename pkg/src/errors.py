# src/errors.py
from typing import Optional


# ===== Define the base error =====
class EngineError(Exception):
    """Base class for every error the engine raises on purpose."""
    exit_code: int = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputError(EngineError, ValueError):
    """Bad argument to an operation (index out of range, mismatched signatures)."""
    exit_code = 2


class ModelParseError(EngineError, ValueError):
    """Syntax error in a model file or an expression string."""
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + location)
        self.reason = message
        self.line = line
        self.column = column


class DimensionError(EngineError, ValueError):
    """Model dimensions are inconsistent."""
    exit_code = 3


class DegenerateMetricError(EngineError, ValueError):
    """Metric is not symmetric, not real or not invertible."""
    exit_code = 4


class UnsupportedError(EngineError):
    """Valid input outside what an operation supports, e.g. spinors on odd rank."""
    exit_code = 5


class DomainError(EngineError, ArithmeticError):
    """A mathematical precondition failed."""
    exit_code = 6

"""Exception hierarchy shared across the toolchain."""

from __future__ import annotations


class TickcheckError(Exception):
    """Base class for every error raised by this package."""


class DiagnosticsError(TickcheckError):
    """Raised when a phase produces error diagnostics instead of a result."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ParseError(DiagnosticsError):
    pass


class ElaborationError(DiagnosticsError):
    pass


class ActionSyntaxError(TickcheckError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class ActionTypeError(TickcheckError):
    def __init__(self, message: str, subexpr=None):
        self.subexpr = subexpr
        super().__init__(message)


class UnboundVariable(ActionTypeError):
    pass


class DivisionByZero(TickcheckError):
    def __init__(self, message: str = "division by zero", step: int | None = None):
        self.step = step
        if step is not None:
            message = f"{message} at step {step}"
        super().__init__(message)


class AlgebraicLoop(TickcheckError):
    def __init__(self, block_ids):
        self.block_ids = list(block_ids)
        super().__init__(f"algebraic loop through blocks {self.block_ids}")


class EncodingError(TickcheckError):
    pass


class BoundTooSmall(EncodingError):
    pass


class UnsupportedKind(EncodingError):
    pass


class NonSiblingTransition(EncodingError):
    pass


class UndeclaredSymbol(EncodingError):
    pass


class MissingPin(TickcheckError):
    pass


class UnknownStateRef(TickcheckError):
    pass


class ParamError(TickcheckError):
    pass


class ClockUndefinedOnTrace(TickcheckError):
    pass


class SpecSyntaxError(TickcheckError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} at {line}:{column}")


class SolverSpawnError(TickcheckError):
    pass


class SolverProtocolError(TickcheckError):
    pass


class TaskError(TickcheckError):
    """Invalid verification task (e.g. deterministic mode on a stochastic model)."""

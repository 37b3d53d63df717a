from typing import Any, Optional


class ShiftCheckError(ValueError):
    """Base class for every failure raised by the dynamics and reporter packages."""

    def __init__(self, message: str, witness: Optional[Any] = None) -> None:
        super().__init__(message)
        self.witness = witness


class InvalidSystem(ShiftCheckError):
    pass


class EmptyShift(ShiftCheckError):
    pass


class PartialBlockMap(ShiftCheckError):
    pass


class AlphabetMismatch(ShiftCheckError):
    pass


class BracketUndefined(ShiftCheckError):
    pass


class StateBlowup(ShiftCheckError):
    pass


class SymbolNotInSubset(ShiftCheckError):
    pass


class NotAllowedPoint(ShiftCheckError):
    pass


class NonUniformRelation(ShiftCheckError):
    pass


class NotInImage(ShiftCheckError):
    pass


class InfiniteFiber(ShiftCheckError):
    pass


class EmptyFiber(ShiftCheckError):
    pass


class AmbiguousComponent(ShiftCheckError):
    pass


class NotResolving(ShiftCheckError):
    pass


class Rho1NotInjective(ShiftCheckError):
    pass


class HypothesisFailed(ShiftCheckError):
    pass


class NonConstant(ShiftCheckError):
    pass


class NotFiniteToOne(ShiftCheckError):
    pass


class CapExceeded(ShiftCheckError):
    def __init__(self, message: str, cap: int, witness: Optional[Any] = None) -> None:
        super().__init__(message, witness)
        self.cap = cap


class WindowTooSmall(ShiftCheckError):
    pass


class WindowMismatch(ShiftCheckError):
    pass


class Mismatch(ShiftCheckError):
    pass


class NotPermutation(ShiftCheckError):
    pass


class NonUniqueV(ShiftCheckError):
    pass


class ParseError(ShiftCheckError):
    def __init__(self, message: str, line: int, column: Optional[int] = None) -> None:
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class UnknownName(ShiftCheckError):
    pass


class InvalidSetting(ShiftCheckError):
    pass

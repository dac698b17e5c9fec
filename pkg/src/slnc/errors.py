"""Exception hierarchy shared by every module."""

from __future__ import annotations


class SNCError(Exception):
    """Base class for all errors raised by this package."""


class NetworkError(SNCError):
    """A network violates a structural invariant (cycle, duplicate id, ...)."""


class ParseError(NetworkError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class CycleError(NetworkError):
    pass


class UnknownEdgeError(SNCError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class UnknownNodeError(NetworkError):
    pass


class EmptySetError(SNCError):
    pass


class UnreachableEdgeError(SNCError):
    """An edge of a target set cannot be reached from the source."""


class EnumerationCapError(SNCError):
    def __init__(self, cap: int, reached: int) -> None:
        super().__init__(f"minimum-cut enumeration exceeded cap {cap} (reached {reached})")
        self.cap = cap
        self.reached = reached


class AlignmentError(SNCError):
    """A cut does not meet each path of a path system in exactly one edge."""


class FieldError(SNCError):
    pass


class DimensionError(SNCError):
    pass


class SingularMatrixError(SNCError):
    pass


class RateError(SNCError):
    """Requested dimension exceeds the minimum sink cut capacity."""


class FieldTooSmallError(SNCError):
    def __init__(self, message: str, *, edge: str | None = None, sink: str | None = None,
                 step: int | None = None) -> None:
        super().__init__(message)
        self.edge = edge
        self.sink = sink
        self.step = step


class DecodeError(SNCError):
    pass


class InstanceTooLargeError(SNCError):
    pass


class CodeError(SNCError):
    """A network code is malformed or violates its invariants."""


class LevelError(SNCError):
    """Security level or rate outside its admissible range."""

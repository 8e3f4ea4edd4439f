#!/usr/bin/env python3
"""
errors.py

Exception hierarchy shared by every dyniso module.

Classes
-------
DynisoError
    Root of all library errors.
GraphParseError
    Malformed graph6 or edge-list text. Carries the offending line and/or byte.
GraphValidationError
    Text parsed but the described structure is not a simple undirected graph.
ContractError
    A precondition of an operation was violated by the caller.
ConfigError
    An environment setting could not be interpreted.
InternalConsistencyError
    An invariant guaranteed by the theory was observed broken; signals a bug.
IntegralityError
    A scaled series coefficient was not an integer.
SingularityError
    Two simulated points came closer than the configured distance floor.
"""

from typing import Optional


class DynisoError(Exception):
    """Base class for every error raised by dyniso."""


class GraphParseError(DynisoError, ValueError):
    """
    Raised when graph text cannot be decoded.

    Attributes
    ----------
    line : int or None
        1-based line number of the offending input line, when known.
    byte : int or None
        0-based byte offset inside the graph6 string, when known.
    """

    def __init__(
        self, message: str, line: Optional[int] = None, byte: Optional[int] = None
    ) -> None:
        location = []
        if line is not None:
            location.append(f"line {line}")
        if byte is not None:
            location.append(f"byte {byte}")
        full = f"{message} ({', '.join(location)})" if location else message
        super().__init__(full)
        self.line = line
        self.byte = byte


class GraphValidationError(DynisoError, ValueError):
    """Raised for loops, asymmetric adjacency and duplicate edges."""


class ContractError(DynisoError, ValueError):
    """Raised when an operation is called outside its precondition."""


class ConfigError(DynisoError, ValueError):
    """Raised when a DYNISO_* environment variable holds an invalid value."""


class InternalConsistencyError(DynisoError, RuntimeError):
    """Raised when a proven invariant fails at runtime."""


class IntegralityError(InternalConsistencyError):
    """Raised when 2^n(2n)!·A_n or 2^(n+1)(2n)!·R_n has a non-integer entry."""


class SingularityError(DynisoError, ArithmeticError):
    """Raised when a pairwise distance drops under the simulator floor."""

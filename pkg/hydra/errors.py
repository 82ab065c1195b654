"""
Exception types shared across hydra. Everything raised on purpose derives from
HydraError so that the CLI can map failures onto exit codes.
"""

# Standard
from typing import Optional


class HydraError(Exception):
    """Base class for all hydra errors"""


class ValidationError(HydraError, ValueError):
    """A graph, partition, system, signature or document is malformed"""


class UniverseMismatchError(ValidationError):
    """A handle was used with a universe that did not create it"""


class ResourceBoundError(HydraError):
    """A configured resource limit would be exceeded"""


class EvaluationError(HydraError, ValueError):
    """An expression or program could not be evaluated"""


class HydraParseError(HydraError, ValueError):
    """Syntax error with the position where it was detected"""

    def __init__(
        self,
        message: str,
        position: int,
        text: Optional[str] = None,
    ):
        self.position = position
        self.line, self.column = _line_and_column(text or "", position)
        self.reason = message
        super().__init__(f"{self.line}:{self.column}: {message}")


def _line_and_column(text: str, position: int):
    """1-based line and column of the given offset"""
    prefix = text[:position]
    line = prefix.count("\n") + 1
    column = position - (prefix.rfind("\n") + 1) + 1
    return line, column

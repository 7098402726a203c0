"""
Exception hierarchy for the D-module engine.

Every error raised by the algebra layer derives from DModuleError so the
CLI can map categories to exit codes without catching unrelated failures.
"""
from typing import Any, Dict, Optional


class DModuleError(Exception):
    """Root of all engine errors."""


class ParseError(DModuleError):
    """Malformed polynomial or operator string."""

    def __init__(self, message: str, text: str = '', position: int = -1):
        self.text = text
        self.position = position
        if position >= 0:
            message = f"{message} at position {position} in '{text}'"
        super().__init__(message)


class SchemaError(DModuleError):
    """Input file does not match the expected JSON schema."""


class VariableMismatch(DModuleError):
    """Operands live over different variable lists."""


class UnknownVariable(DModuleError):
    """Variable is not part of the ring's variable list."""


class RingMismatch(DModuleError):
    """Operands live over different localized rings."""


class UndeclaredDenominator(DModuleError):
    """Division by a non-unit that is not a product of declared denominators."""


class ZeroInputError(DModuleError):
    """Operation is undefined on the zero element."""


class ShapeMismatch(DModuleError):
    """Matrix or vector dimensions do not agree."""


class NonIntegrableError(DModuleError):
    """A complex was requested from a connection with nonzero curvature."""


class ComplexError(DModuleError):
    """Differentials do not compose to zero, or shapes do not chain."""


class NotAChainMap(DModuleError):
    """Per-degree maps do not commute with the differentials."""


class TruncationPolluted(DModuleError):
    """Homology was requested at a boundary degree of a truncated complex."""


class CapExceeded(DModuleError):
    """A truncation cap is outside the configured hard limits."""


class LiftFailure(DModuleError):
    """A representative could not be lifted through a surjection."""

    def __init__(self, message: str, offending_class: Optional[Any] = None):
        self.offending_class = offending_class
        super().__init__(message)


class ReductionStuck(DModuleError):
    """
    Hermite reduction met a singular pole-order or degree step.

    Attributes:
        certificate: JSON-ready description of the stuck step
    """

    def __init__(self, message: str, certificate: Optional[Dict[str, Any]] = None):
        self.certificate = certificate or {}
        super().__init__(message)

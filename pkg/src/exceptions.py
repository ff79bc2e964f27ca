"""Typed errors raised across the library."""
from typing import Any, Optional, Sequence


class DynaHeightError(Exception):
    """Base class for library errors."""


class PolynomialParseError(DynaHeightError, ValueError):
    """Polynomial text could not be parsed."""

    def __init__(self, text: str, message: str, line: int = 1, column: int = 0):
        self.text = text
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message} in {text!r}")


class CompositionError(DynaHeightError, ValueError):
    """Composition requested on unsuitable polynomials."""


class DegreeError(DynaHeightError, ValueError):
    """A polynomial has the wrong degree for the requested operation."""


class IterateTooLargeError(DynaHeightError, RuntimeError):
    """An iterate exceeded the configured size cap."""

    def __init__(self, message: str, best_estimate: Optional[Any] = None):
        self.best_estimate = best_estimate
        super().__init__(message)


class PrecisionExhaustedError(DynaHeightError, RuntimeError):
    """Root designation failed after the configured refinements."""


class NotDisintegratedError(DynaHeightError, ValueError):
    """The map is conjugate to a power map or to a Chebyshev polynomial."""

    def __init__(self, message: str, label: str = ""):
        self.label = label
        super().__init__(message)


class NonPeriodicConstantError(DynaHeightError, ValueError):
    """A constant coordinate is not periodic within the period cap."""

    def __init__(self, message: str, orbit_prefix: Sequence[str] = ()):
        self.orbit_prefix = list(orbit_prefix)
        super().__init__(message)


class NonCommuterError(DynaHeightError, ValueError):
    """A generator does not commute with any searched iterate."""

    def __init__(self, message: str, failing: str = ""):
        self.failing = failing
        super().__init__(message)


class XoaEmptyError(DynaHeightError, RuntimeError):
    """The variety is covered by anomalous subvarieties."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"X^oa empty: {reason}")


class AnomalousFiberError(DynaHeightError, RuntimeError):
    """A reduced intersection system has positive dimension."""


class PreperiodicSeedError(DynaHeightError, ValueError):
    """A growth experiment was seeded with a preperiodic point."""


class ConfigError(DynaHeightError, ValueError):
    """Experiment configuration is invalid."""

"""Domain exceptions raised across the toolkit.

Every error derives from ``NetworkIdentificationError`` so callers (the CLI in
particular) can catch library failures with a single ``except`` clause while
still treating them as ordinary ``ValueError``s.
"""
from typing import Iterable, List


class NetworkIdentificationError(ValueError):
    """Base class for all library errors."""


class InvalidModelError(NetworkIdentificationError):
    """A graph, system, corruption model or MRF violates its invariants."""


class DimensionMismatchError(NetworkIdentificationError):
    """Operands disagree on node count or matrix shape."""


class SingularEvaluationError(NetworkIdentificationError):
    """A transfer-function denominator vanishes at an evaluation point."""


class UnstableSystemError(NetworkIdentificationError):
    """A network or corruption system has no stationary regime."""


class NoStationarySolutionError(UnstableSystemError):
    """The generalized Lyapunov operator E[A (x) A] is not contractive."""


class TruncationError(NetworkIdentificationError):
    """An autocorrelation sequence is not summable at the configured lag."""


class SingularSpectrumError(NetworkIdentificationError):
    """A spectral matrix is (numerically) singular at some grid frequencies."""

    def __init__(self, message: str, frequencies: Iterable[float] = ()):
        self.frequencies: List[float] = [float(w) for w in frequencies]
        if self.frequencies:
            shown = ", ".join(f"{w:.4f}" for w in self.frequencies[:8])
            more = "" if len(self.frequencies) <= 8 else f" (+{len(self.frequencies) - 8} more)"
            message = f"{message} at omega = [{shown}]{more}"
        super().__init__(message)


class EnumerationCapError(NetworkIdentificationError):
    """Exhaustive enumeration would exceed the configured state cap."""


class ConfigValidationError(NetworkIdentificationError):
    """An experiment document failed schema validation."""


__all__ = [
    'NetworkIdentificationError',
    'InvalidModelError',
    'DimensionMismatchError',
    'SingularEvaluationError',
    'UnstableSystemError',
    'NoStationarySolutionError',
    'TruncationError',
    'SingularSpectrumError',
    'EnumerationCapError',
    'ConfigValidationError',
]

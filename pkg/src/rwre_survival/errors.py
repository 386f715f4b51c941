"""Exception types shared across the package.

Validation errors (malformed inputs, broken model assumptions) are kept
distinct from numerical errors (fits or classifications that cannot be
carried out on otherwise valid inputs) so callers, in particular the CLI,
can map them to different exit codes.
"""

from __future__ import annotations

__all__ = [
    "RwreError",
    "ValidationError",
    "NumericalError",
    "MalformedLaw",
    "EllipticityViolation",
    "InvalidSequence",
    "EmptyConditioning",
    "NontrivialityViolation",
    "OutOfWindow",
    "WindowTooSmall",
    "HorizonTooLarge",
    "InsufficientData",
    "DegenerateCurve",
    "UnclassifiedRegime",
]


class RwreError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(RwreError):
    """Invalid input: bad file, malformed law, broken model assumption."""


class NumericalError(RwreError):
    """Valid input on which the requested numerical task is impossible."""


class MalformedLaw(ValidationError):
    """Site law whose atoms or weights fail the normalization checks."""


class EllipticityViolation(ValidationError):
    """Site law with an atom whose jump probabilities reach zero."""


class InvalidSequence(ValidationError):
    """Target tail sequence that is not positive and nonincreasing."""


class EmptyConditioning(ValidationError):
    """No atom satisfies the requested holding-probability cutoff."""


class NontrivialityViolation(ValidationError):
    """Limit quantities degenerate (zero drift magnitude on one side)."""


class OutOfWindow(ValidationError):
    """Site or potential argument outside the sampled window."""


class WindowTooSmall(ValidationError):
    """Window does not cover the range required by the requested horizon."""


class HorizonTooLarge(ValidationError):
    """Horizon beyond the supported size for exact path enumeration."""


class InsufficientData(NumericalError):
    """Too few usable points for a regression."""


class DegenerateCurve(NumericalError):
    """Survival curve stuck at 0 or 1 on every grid point."""


class UnclassifiedRegime(NumericalError):
    """Decay prediction requested for a law outside the known regimes."""

"""Exception hierarchy for spinconc."""

from __future__ import annotations

__all__ = [
    "SpinConcError",
    "NormalizationError",
    "LabelError",
    "IdentityError",
    "ExclusionError",
    "ProjectionError",
    "ProtocolStateError",
    "DomainError",
]


class SpinConcError(Exception):
    """Base class for every error raised by this package."""


class NormalizationError(SpinConcError, ValueError):
    """Coefficients or amplitudes do not have unit norm, or are not finite."""


class LabelError(SpinConcError, ValueError):
    """Duplicate or overlapping mode labels / electron ids."""


class IdentityError(SpinConcError, KeyError):
    """An operation referenced an electron that is not tracked by the state."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class ExclusionError(SpinConcError, RuntimeError):
    """Two electrons ended up in the same (mode, spin) slot."""


class ProjectionError(SpinConcError, ValueError):
    """A requested measurement branch has (numerically) zero probability."""


class ProtocolStateError(SpinConcError, ValueError):
    """A state handed to a protocol stage does not have the expected layout."""


class DomainError(SpinConcError, ValueError):
    """A scalar argument lies outside the domain of a formula."""

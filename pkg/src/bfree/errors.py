"""Shared exception types.

Exit-code mapping for the CLI: subclasses of :class:`ComputationalLimit`
mean "the computation hit a configured ceiling, raise it and retry" (exit 1);
everything else that is a :class:`BFreeError` is a hard semantic failure.
Violated preconditions raise plain :class:`ValueError`.
"""

from __future__ import annotations


class BFreeError(Exception):
    """Base class for library-specific errors."""


class ComputationalLimit(BFreeError):
    """A configured ceiling or width limit was exceeded."""


class CeilingExceeded(ComputationalLimit):
    """Input exceeds the factorization / enumeration ceiling."""


class SearchExhausted(ComputationalLimit):
    """A bounded search ended without a hit (existence may still hold)."""


class TermExplosion(ComputationalLimit):
    """An exact density computation would exceed its width/sieve limits."""


class EnumerationCeiling(ComputationalLimit):
    """A structurally finite set has a size bound above the ceiling."""


class Incompatible(BFreeError):
    """A congruence system has a clashing pair of constraints."""

    def __init__(self, pair, message=None):
        self.pair = pair
        super().__init__(message or f"incompatible congruences: {pair[0]} vs {pair[1]}")


class CertificateAuditFailure(BFreeError):
    """A declared coprime certificate failed a machine audit."""

    def __init__(self, scale, index, message=None):
        self.scale = scale
        self.index = index
        super().__init__(message or f"certificate at scale {scale} fails at term {index}")


class FlipNotAllowed(BFreeError):
    """A requested flip position is not in the allowed strip."""

    def __init__(self, position, message=None):
        self.position = position
        super().__init__(message or f"position {position} cannot be flipped")


class CertificateMissing(BFreeError):
    """A flip needs a coprime certificate that the family does not declare."""

"""
Error taxonomy for the tribase toolkit
Every error carries the CLI exit code it maps to
"""
from typing import Optional

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_AMBIGUOUS = 3
EXIT_RETRIES = 4
EXIT_ORACLE = 5


class TribaseError(Exception):
    """Base class for all toolkit errors"""
    exit_code = EXIT_SCHEMA


class ZeroVector(TribaseError):
    """All amplitudes vanish, so no state can be formed"""


class UnsupportedDimension(TribaseError):
    """Dimension is odd or below 4"""


class DimensionMismatch(TribaseError):
    pass


class InvalidParams(TribaseError):
    """Pair-basis parameters violate a² + b² = 1 or a, b > 0"""


class DegenerateDraw(TribaseError):
    """Random completion vectors could not be orthogonalized"""


class LinearlyDependent(TribaseError):
    pass


class SubspaceTooSmall(TribaseError):
    pass


class EnumerationTooLarge(TribaseError):
    """Candidate enumeration would exceed the configured dimension cap"""


class EmptyInput(TribaseError):
    pass


class SchemaError(TribaseError):
    """Input document does not match its schema

    Args:
        message: Human readable description
        location: Field path ("records.1.counts") or "line N"
    """

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class AmbiguousSupport(TribaseError):
    """Canonical frequencies show two or more separated nonzero arcs

    The zero pattern is attached so callers can adapt the bases to each arc.
    """
    exit_code = EXIT_AMBIGUOUS

    def __init__(self, pattern, message: Optional[str] = None):
        self.pattern = pattern
        super().__init__(message or (
            f"support splits into {len(pattern.arcs)} arcs "
            f"(zeros at {sorted(pattern.zero_indices)}); "
            "estimate each arc with adapt_to_support"
        ))


class RetriesExhausted(TribaseError):
    """Likelihood stayed degenerate after every allowed re-randomization"""
    exit_code = EXIT_RETRIES

    def __init__(self, report, message: Optional[str] = None):
        self.report = report
        super().__init__(message or f"likelihood tie persists after {report.retries} retries")


class OracleFailure(TribaseError):
    exit_code = EXIT_ORACLE

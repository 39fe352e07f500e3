"""Exception hierarchy shared across the package.

Three broad families matter to callers (and to the CLI exit codes):
validation of input data, violated method preconditions, and failures of
the solving/certification machinery itself.
"""
from __future__ import annotations


class ContextualityError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------------------
# Input validation (CLI exit code 2)
# ---------------------------------------------------------------------------

class ValidationError(ContextualityError):
    """A system, pmf, or file failed an invariant check."""


class NonNormalizedPmf(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class UnknownProperty(ValidationError):
    pass


class UnknownContext(ValidationError):
    pass


class EmptyContext(ValidationError):
    pass


class DuplicateOutcome(ValidationError):
    pass


class InvalidPosition(ValidationError):
    pass


class NonBinaryAlphabet(ValidationError):
    pass


class AlphabetMismatch(ValidationError):
    pass


class MeanOutOfRange(ValidationError):
    pass


class UnrealizableStats(ValidationError):
    pass


class ParseError(ValidationError):
    """A textual input could not be parsed; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Method preconditions (CLI exit code 3)
# ---------------------------------------------------------------------------

class MethodPreconditionError(ContextualityError):
    """The requested computation is not defined for the given input."""


class InconsistentlyConnected(MethodPreconditionError):
    pass


class ModelNotConsistentlyConnected(MethodPreconditionError):
    pass


class ShapeMismatch(MethodPreconditionError):
    pass


class Infeasible(MethodPreconditionError):
    """The optimization has an empty feasible set."""


class AlphabetTooLarge(MethodPreconditionError):
    """A joint block would exceed the configured size cap."""


class TooLarge(MethodPreconditionError):
    """A brute-force enumeration would exceed its size cap."""


# ---------------------------------------------------------------------------
# Solver failures (CLI exit code 4)
# ---------------------------------------------------------------------------

class SolverError(ContextualityError):
    pass


class DimensionMismatch(SolverError):
    """A linear program's pieces do not fit together."""


class NumericalFailure(SolverError):
    """The floating-point verification path failed to produce a result."""


class CertificationFailure(SolverError):
    """An allegedly optimal solution failed exact certificate checks."""

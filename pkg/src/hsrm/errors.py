"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class HsrmError(Exception):
    """Base class for every error raised by this package."""


class InputError(HsrmError):
    """Bad user input; the CLI maps these to exit code 2."""


# indicators
class ZeroCitations(InputError):
    pass


class InvalidThresholds(InputError):
    pass


class InvalidProfile(InputError):
    pass


# srm
class EmptyProfile(InputError):
    pass


class DegenerateQuadratic(HsrmError):
    pass


class FitError(HsrmError):
    """A fit could not be produced for a particular series."""


class TooFewPublications(FitError):
    pass


class NoFeasibleSeed(FitError):
    pass


class SingularJacobian(FitError):
    pass


class NotConverged(HsrmError):
    pass


# cohort
class InvalidBins(InputError):
    pass


class UnknownMetric(InputError):
    pass


class InvalidSpec(InputError):
    pass


class InvalidConfig(InputError):
    pass


# ingest
class IngestError(InputError):
    """Parse/validation failure; ``line`` is the 1-based source line if known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedRow(IngestError):
    pass


class NegativeCitations(IngestError):
    pass


class NonIntegerCitations(IngestError):
    pass


class DuplicateKey(IngestError):
    pass

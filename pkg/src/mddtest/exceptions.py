"""Exception types shared across the package."""


class MddTestError(Exception):
    """Base class for every error raised by this package."""


class InvalidData(MddTestError, ValueError):
    """Input arrays contain non-finite values or have unusable shapes."""


class SampleTooSmall(InvalidData):
    """Fewer observations than the estimator's denominators allow."""


class OracleRangeExceeded(MddTestError, ValueError):
    """A brute-force oracle was called outside its tractable size range."""


class DegenerateData(MddTestError):
    """A studentizer is exactly zero (constant response or covariates)."""


class DegenerateDraw(MddTestError):
    """A single multiplier draw produced a zero bootstrap studentizer."""


class InvalidQuantile(MddTestError, ValueError):
    """Quantile level outside the open unit interval."""


class InvalidConfig(MddTestError, ValueError):
    """A simulation or test configuration is internally inconsistent."""


class InvalidInput(MddTestError, ValueError):
    """A procedure received an empty or out-of-range argument."""


class ReplicationFailed(MddTestError):
    """A Monte Carlo replication raised; carries the replication index."""


class ParseError(MddTestError, ValueError):
    """A tabular input file could not be parsed.

    ``row`` and ``column`` identify the offending cell when known
    (1-based data row, column name or index).
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DuplicateSetId(ParseError):
    """Two gene sets in one collection share an identifier."""

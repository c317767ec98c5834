"""
Error hierarchy for the Stylized Facts toolkit.

Library code raises these; the per-stock pipeline turns them into
not-evaluable markers and the CLI maps them onto exit codes.
"""

from typing import Optional


class StylizedFactsError(Exception):
    """Base class for every error raised by the toolkit"""


class FormatError(StylizedFactsError):
    """Input file lacks a required column or is not delimited text"""

    def __init__(self, message: str, column: Optional[str] = None):
        super().__init__(message)
        self.column = column


class RowError(StylizedFactsError):
    """A data row holds an unparseable date or number (row is 1-based, header excluded)"""

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class ManifestError(StylizedFactsError):
    """Manifest is malformed, duplicates tickers or points at missing files"""


class EmptySeriesError(StylizedFactsError):
    pass


class InsufficientDataError(StylizedFactsError):
    pass


class DegenerateSampleError(StylizedFactsError):
    """Zero variance, all-degenerate blocks, or a correlation of exactly +-1"""


class InvalidLagError(StylizedFactsError):
    pass


class SingularDesignError(StylizedFactsError):
    pass


class DomainError(StylizedFactsError):
    pass


class UnsupportedSizeError(StylizedFactsError):
    pass


class NumericOverflowError(StylizedFactsError):
    pass


class ConvergenceError(StylizedFactsError):
    """An optimizer stopped without meeting its tolerance"""

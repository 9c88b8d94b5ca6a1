"""Exception types shared across the package.

DataError covers malformed or inconsistent inputs (CLI exit code 3);
NumericalError covers failures inside the factorization itself (exit code 4).
"""


class DataError(Exception):
    """Bad or inconsistent input data."""


class ParseError(DataError):
    """A record in an input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class AlignmentError(DataError):
    """Two labeled sets do not cover the same documents."""


class ModelError(DataError):
    """A persisted topic model could not be loaded."""


class ModelVersionError(ModelError):
    """Model file declares an unsupported format version."""


class ModelHashError(ModelError):
    """Model file content does not match its fingerprint."""


class ModelFormatError(ModelError):
    """Model file is truncated or not valid JSON."""


class NumericalError(Exception):
    """Numerical failure during factorization (non-finite values, empty input)."""

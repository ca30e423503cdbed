"""Exception hierarchy shared by all engine modules.

Everything raised on bad input data derives from :class:`DataError`, which the
CLI maps to exit code 2. Programming/usage mistakes raise plain ValueError.
"""

from __future__ import annotations


class DataError(Exception):
    """Base class for errors caused by the input data or configuration files."""


class ParseError(DataError):
    """A row in an input file could not be parsed."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class DuplicateIdError(DataError):
    pass


class ReferentialIntegrityError(DataError):
    """An edge references a doc_id that was never declared."""


class EmptyCorpusError(DataError):
    pass


class CacheError(DataError):
    """Corpus cache file is unreadable or has the wrong version magic."""


class ContextError(DataError):
    """A required normalization lookup row is missing."""


class RewireError(DataError):
    pass


class ConfigError(DataError):
    """A configuration file required by an operation is missing or empty."""


class RankDeficiencyError(DataError):
    """Regression design matrix is rank deficient."""

    def __init__(self, term: str):
        self.term = term
        super().__init__(f"design matrix is rank deficient (collinear column: {term})")

"""Exception types shared across the package."""


class TierkbError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(TierkbError, ValueError):
    """A dataset or CSV header does not match the declared schema."""


class CsvParseError(TierkbError, ValueError):
    """A CSV cell could not be parsed; carries row/column context."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDatasetError(TierkbError, ValueError):
    """An operation that requires data received an empty dataset."""


class DataIntegrityWarning(UserWarning):
    """Non-fatal anomaly in ingested data (unexpected counts, empty classes)."""


class KbParseError(TierkbError, ValueError):
    """A knowledge-base text document failed to parse; carries line/token context."""

    def __init__(self, message: str, line: int | None = None, token: str | None = None):
        super().__init__(message)
        self.line = line
        self.token = token

    def __str__(self):
        message = super().__str__()
        return message if self.line is None else f"line {self.line}: {message}"


class KbIntegrityError(TierkbError, ValueError):
    """A knowledge-base mutation would violate referential integrity or acyclicity."""


class PopulationError(TierkbError, ValueError):
    """Populating individuals into a knowledge base failed (e.g. name collision)."""


class RuleValidationError(TierkbError, ValueError):
    """A rule is structurally invalid or references undeclared vocabulary."""


class DivergenceError(TierkbError, RuntimeError):
    """Model training produced a non-finite loss."""

    def __init__(self, message: str, epoch: int | None = None):
        super().__init__(message)
        self.epoch = epoch


class ModelFormatError(TierkbError, ValueError):
    """A saved-model document is malformed or has an unsupported version."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class InconsistentKbError(TierkbError, RuntimeError):
    """A pipeline stage found the knowledge base inconsistent and aborted."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report

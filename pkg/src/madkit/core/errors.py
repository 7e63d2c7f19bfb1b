"""Exception types shared across the toolkit."""


class MadkitError(Exception):
    """Base class for all toolkit errors."""


class ManifestError(MadkitError):
    """Manifest file cannot be parsed or has an invalid schema.

    ``line`` and ``field`` locate the problem when they are known.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class FormatError(MadkitError):
    """A data file (embeddings, landmarks, scores, ...) violates its format."""


class EmptyClassError(MadkitError):
    """A metric was asked to operate on an empty score class."""


class ModelFormatError(MadkitError):
    """A persisted classifier file is corrupt or has an unsupported version."""

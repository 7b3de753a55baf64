"""Exception hierarchy shared by every module."""


class PPTError(Exception):
    """Base class for all package errors."""


class ModelError(PPTError, ValueError):
    """A model violates a structural constraint."""


class ModelFormatError(ModelError):
    """A model, requirement or test-set file could not be decoded."""


class PathError(PPTError, ValueError):
    """An edge sequence is not a valid path of the model it is checked against."""


class InfeasibleError(PPTError):
    """Some target cannot be embedded in any start-to-end path.

    ``targets`` lists the offending paths (edge-id tuples or node tuples).
    """

    def __init__(self, message: str, targets=()):
        super().__init__(message)
        self.targets = tuple(targets)


class MetricsError(PPTError, ValueError):
    """A ratio is undefined for the given record (e.g. zero edges)."""


class CorpusError(PPTError):
    """The requested corpus statistics cannot be realised."""

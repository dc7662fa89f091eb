"""Exception hierarchy shared by all pathlyap modules."""


class PathLyapError(Exception):
    """Base class for every error raised by pathlyap."""


class FormatError(PathLyapError, ValueError):
    """A JSON document does not conform to its schema."""


class EmptyLabelError(FormatError):
    pass


class UnknownSymbolError(FormatError):
    pass


class DuplicateNodeError(FormatError):
    pass


class BudgetExceeded(PathLyapError):
    """An enumeration grew past its budget; the question is left undecided."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class DimensionError(PathLyapError, ValueError):
    pass


class NotPathCompleteError(PathLyapError):
    """An operation whose soundness needs a path-complete graph got one that is not."""


class CycleDetected(PathLyapError):
    """The auxiliary graph has a cycle, so the supposedly missing word is readable."""


class CertificateError(PathLyapError):
    """A certificate is malformed or fails a verification it was required to pass."""

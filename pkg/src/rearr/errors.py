"""Exception hierarchy shared by the library and the command line."""


class RearrError(Exception):
    """Base class for every error raised by :mod:`rearr`."""


class DomainError(RearrError, ValueError):
    """An argument lies outside the domain of the function or operation."""


class PreconditionError(RearrError, ValueError):
    """An input violates a documented precondition (monotonicity, positivity, ...)."""


class UnsupportedCompositionError(RearrError):
    """The requested composition has no exact rational representation."""


class DivergenceError(RearrError):
    """A monotone search did not bracket its target below the search ceiling."""


class ConditionViolatedError(RearrError):
    """The tail-decay hypothesis of the infinite-interval majorant fails."""


class DocumentError(RearrError, ValueError):
    """A JSON document is malformed; ``where`` locates the offending field."""

    def __init__(self, message, where=""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)

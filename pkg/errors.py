class QuiverError(Exception):
    """Base class for every failure raised by this package."""


class InputError(QuiverError, ValueError):
    """Malformed input: bad shapes, bad indices, unparsable files."""


class HypothesisError(QuiverError):
    """A mathematical hypothesis or precondition does not hold.

    `step` is the word position when the failure happened inside a word.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class PreconditionError(HypothesisError):
    """A reflection functor cannot be applied.

    `reason` is one of ``eigenvalue-vanishing``, ``degeneracy`` or
    ``concentrated``.
    """

    def __init__(self, message: str, reason: str, step: int | None = None):
        super().__init__(message, step)
        self.reason = reason


class VerificationError(HypothesisError):
    """A constructed object failed its verification battery."""


class UnsupportedError(QuiverError):
    """The request is well-formed but the feature is not available."""


class ConvergenceError(QuiverError, ArithmeticError):
    def __init__(self, message: str, partial_roots=None):
        super().__init__(message)
        self.partial_roots = list(partial_roots or [])

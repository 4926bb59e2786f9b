"""Exception types shared across the library.

Each maps to a distinct CLI exit code, so keep the hierarchy flat.
"""


class InvlabError(Exception):
    """Base class for library errors."""


class FormatError(InvlabError):
    """A matrix or vector file could not be parsed."""


class DimensionMismatchError(InvlabError):
    """Operands have incompatible or unsupported shapes."""


class SingularMatrixError(InvlabError):
    """A factorization or inversion hit a (numerically) singular pivot.

    ``detail`` records where: the elimination step for LU/QR, or the
    recursion path for the block inversion.
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class NonConvergenceError(InvlabError):
    """An iteration ran out of its budget before meeting its tolerance.

    ``measure`` holds the last convergence measure seen, when available.
    """

    def __init__(self, message, measure=None):
        super().__init__(message)
        self.measure = measure

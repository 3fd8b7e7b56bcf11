"""Shared exception types.

Everything raised on purpose by this package derives from CayleykitError,
so callers can catch one base class at CLI boundaries.
"""


class CayleykitError(Exception):
    """Base class for all structured errors raised by cayleykit."""


class BackendMismatch(CayleykitError):
    """Operands live on different numeric backends, or a value is not
    representable on the requested backend (e.g. a float fed to the exact
    rational backend)."""


class DimensionMismatch(CayleykitError):
    """Operands live in different ambient dimensions, or an index is out of
    range for the ambient space."""


class GradeError(CayleykitError):
    """An operation needed homogeneous inputs of compatible grades and did
    not get them."""


class TypeMismatch(CayleykitError):
    """A vector or form fails the complex-type constraint it was declared
    with (e.g. claimed (0,1) but J v != -i v)."""


class PlaneError(CayleykitError):
    """A plane input is unusable: rows not orthonormal within tolerance,
    rank-deficient, or of the wrong shape."""


class ValidationError(CayleykitError):
    """An input value violates a documented precondition (radius bounds,
    non-unit phase pairs, bad coefficient shapes, ...)."""


class ConvergenceError(CayleykitError):
    """An iteration failed to reach its residual target.

    Carries the final residual and iteration count so callers can report
    how close the run got.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NonIntegralError(CayleykitError):
    """A quantity that must come out an integer (an index, a half-sum of
    topological terms) did not."""


class InputFormatError(CayleykitError):
    """A file or serialized payload could not be parsed into the expected
    structure."""

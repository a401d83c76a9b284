"""Exception hierarchy shared by every module of the package."""


class PFLRError(Exception):
    """Base class for all errors raised by ``pflr_el``."""


class DimensionError(PFLRError, ValueError):
    """Array shapes that should agree do not."""


class DomainError(PFLRError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(PFLRError, ValueError):
    """A model or run configuration cannot be honoured (e.g. ``k_n >= n - p``)."""


class SingularMatrixError(PFLRError, ArithmeticError):
    """A matrix that must be positive definite is numerically singular.

    Parameters
    ----------
    name : str
        Human readable name of the offending matrix, e.g. ``"B^T B"``.
    ratio : float
        Smallest over largest eigenvalue at the time of failure.
    """

    def __init__(self, name, ratio=float("nan")):
        self.name = name
        self.ratio = ratio
        super().__init__(f"matrix {name} is numerically singular "
                         f"(eigenvalue ratio {ratio:.3g})")


class NotPSDError(PFLRError, ArithmeticError):
    """A matrix that must be positive semidefinite has a materially negative eigenvalue."""


class DegenerateFitError(PFLRError, ArithmeticError):
    """The fit has zero residual variance, so variance-scaled statistics are undefined."""


class InputError(PFLRError, ValueError):
    """Input data contain non-finite values."""


class DataFormatError(PFLRError, ValueError):
    """A dataset file is malformed; ``line`` is the 1-based line number, if known."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)

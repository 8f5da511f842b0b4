"""Exception hierarchy shared by all qcalab modules."""


class QCAError(Exception):
    """Base class for every error raised by qcalab."""


class UnknownGeneratorError(QCAError, KeyError):
    pass


class MissingEdgeError(QCAError):
    """A path asked for an edge that the (finite) graph does not contain."""


class UnsupportedPresentationError(QCAError):
    pass


class UnreachableError(QCAError):
    pass


class NonUnitaryError(QCAError):
    pass


class BranchCutError(QCAError):
    """An eigenphase sits on the branch cut of the principal logarithm."""


class DegeneracyError(QCAError):
    """A dispersion branch crosses another one at the evaluation point."""


class DegenerateFitError(QCAError):
    """All residuals are at the floating-point floor; no scaling to fit."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IllConditionedError(QCAError):
    pass


class SupportMismatchError(QCAError):
    pass


class OverlapError(QCAError):
    """A neighbourhood wraps onto itself on a too-small torus."""


class SingularPointError(QCAError):
    pass


class ShapeError(QCAError, ValueError):
    pass


class WrapAroundError(QCAError):
    """A tracked packet travelled far enough to wrap around the torus."""

    def __init__(self, message, step=None, partial=None):
        super().__init__(message)
        self.step = step
        self.partial = partial


class CapExceededError(QCAError):
    pass


class FrameError(QCAError, ValueError):
    pass


class ConfigError(QCAError, ValueError):
    pass

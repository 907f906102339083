"""Exception types raised across the package."""


class UVLabError(Exception):
    """Base class for all library errors."""


class NonConvergentQuadrature(UVLabError):
    pass


class UnboundedTail(UVLabError):
    pass


class UnboundedWeightedTail(UVLabError):
    pass


class MissingModelData(UVLabError):
    pass


class NoClosedFormAndDivergent(UVLabError):
    pass


class SampleTooSmall(UVLabError):
    pass


class ReportedResidualExceeded(UVLabError):
    """Raised when a decomposition residual exceeds its contract.

    The offending report is attached as ``self.report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnclassifiableAtCap(UVLabError):
    pass


class MissingMoments(UVLabError):
    pass


class UnsupportedInnovation(UVLabError):
    pass


class ConstraintViolated(UVLabError):
    pass


class GridTooCoarse(UVLabError):
    pass


class UnsupportedRegime(UVLabError):
    pass


class KernelNotClassified(UVLabError):
    pass


class ClassificationMismatch(UVLabError):
    pass


class ConfigError(UVLabError):
    pass

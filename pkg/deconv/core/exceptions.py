from typing import Optional, Sequence


class DeconvError(ValueError):
    """Base class of every domain error raised by the package"""

    exit_code: int = 2

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class SingularCoefficientError(DeconvError):
    """Leading coefficient u(0) or p(l, 0) vanishes"""


class EnumerationSizeError(DeconvError):
    """Brute-force enumeration requested beyond its cap"""


class NumericRangeError(DeconvError):
    """Truncation index outside the reliable range"""


class PreconditionError(DeconvError):
    """Input violates a documented precondition"""


class ScenarioError(DeconvError):
    """Scenario file or override is invalid"""


class ExportError(DeconvError):
    """Result frame could not be written or read"""

    exit_code = 1


class DivergenceError(DeconvError):
    """Partial sums of a pointwise deconvolution do not settle"""

    exit_code = 3

    def __init__(self, message: str, partial_sums: Sequence[float] = ()):
        super().__init__(message)
        self.partial_sums = list(partial_sums)

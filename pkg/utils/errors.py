"""
Error Types
===========

Every failure raised by the library derives from EigenChannelError so the CLI
can map it to an exit code in one place.
"""


class EigenChannelError(Exception):
    """Base class for all channel model errors"""


class DimensionError(EigenChannelError, ValueError):
    """Matrix/vector shapes do not match or the size is unsupported"""


class NormError(EigenChannelError, ValueError):
    """A vector is not unit-norm or a matrix is not unitary"""


class ConvergenceError(EigenChannelError, RuntimeError):
    """The Jacobi SVD hit its sweep cap"""


class ConstraintViolationError(EigenChannelError, RuntimeError):
    """Too many first-column samples needed capping"""


class FilterSingularityError(EigenChannelError, ValueError):
    """A classical Doppler filter was evaluated exactly at the band edge"""


class ConfigError(EigenChannelError, ValueError):
    """Bad configuration document or out-of-range parameter"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class TraceFormatError(EigenChannelError, ValueError):
    """A trace file failed header or length validation"""


class AnalysisError(EigenChannelError, ValueError):
    """Not enough data, degenerate fit, or disjoint ranges"""

class SU11Error(Exception):
    """Base class for errors raised by the SU(1,1) toolkit"""


class DimensionMismatchError(SU11Error, ValueError):
    """Operators or blocks live on Fock spaces of different dimension"""


class DomainError(SU11Error, ValueError):
    """Arguments outside the region where a formula is defined"""


class PoleError(DomainError):
    """A gamma ratio or hypergeometric denominator hits a pole"""


class ConvergenceError(SU11Error, RuntimeError):
    """An adaptive sum reached its term cap before the stopping rule held"""

    def __init__(self, message: str, partial: complex = None, tail_estimate: float = None):
        super().__init__(message)
        self.partial = partial
        self.tail_estimate = tail_estimate


class ConfigError(SU11Error, ValueError):
    """Invalid run configuration (mapped to exit code 2 by the CLI)"""

"""Exception types raised across the package."""


class RangingError(Exception):
    """Base class for all package errors."""


class ParameterError(RangingError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(RangingError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class GeometryError(ParameterError):
    """A point lies outside the room."""


class NoSignalError(RangingError):
    """The received snippet carries no energy to correlate."""


class NegativeDistanceError(DomainError):
    """The selected lag lies beyond the wake offset (a spurious late peak)."""


class ParseError(RangingError):
    """A waveform or results file could not be parsed."""


class RateMismatchError(ParameterError):
    """Two sample rates that must agree do not."""


class ConfigError(RangingError):
    """One or more configuration values are invalid.

    ``problems`` lists every violated constraint, not only the first.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))

"""Exception hierarchy shared by all steersim modules."""


class SteerSimError(Exception):
    """Base class for every error raised by steersim."""


class NotPrime(SteerSimError, ValueError):
    pass


class UnsupportedSize(SteerSimError, ValueError):
    pass


class DivisionByZero(SteerSimError, ZeroDivisionError):
    pass


class SizeOverflow(SteerSimError, ValueError):
    pass


class BadSplit(SteerSimError, ValueError):
    pass


class NonHermitian(SteerSimError, ValueError):
    pass


class InvalidDensity(SteerSimError, ValueError):
    pass


class UnsupportedDimension(SteerSimError, ValueError):
    pass


class DimensionMismatch(SteerSimError, ValueError):
    pass


class IndexOutOfRange(SteerSimError, IndexError):
    pass


class BadProbability(SteerSimError, ValueError):
    pass


class DegenerateSpectrum(SteerSimError, ValueError):
    pass


class EmptyTable(SteerSimError, ValueError):
    pass


class SingularFit(SteerSimError, ValueError):
    pass


class ConfigError(SteerSimError, ValueError):
    """Invalid configuration; ``errors`` maps field names to messages."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = dict(errors or {})

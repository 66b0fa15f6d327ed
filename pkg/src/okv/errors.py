"""Exception types raised across the package."""


class OkvError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(OkvError, ValueError):
    pass


class CapExceeded(OkvError):
    """A desk-scale enumeration limit was hit."""

    def __init__(self, what, predicted, cap):
        super().__init__(f"{what}: predicted {predicted} candidates exceeds cap {cap}")
        self.predicted = predicted
        self.cap = cap


class UnboundedError(OkvError, ValueError):
    pass


class NotSymmetric(OkvError, ValueError):
    pass


class NotPrime(OkvError, ValueError):
    pass


class FlagError(OkvError, ValueError):
    """Invalid flag data (point off the chain, duplicate hyperplanes, ...)."""


class ZeroSection(OkvError, ValueError):
    """Valuations are undefined on the zero element."""


class ConfigError(OkvError, ValueError):
    pass

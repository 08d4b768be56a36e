"""Exception types raised across the package."""


class NaclError(Exception):
    """Base class for every error raised by this package."""


class CapExceeded(NaclError):
    pass


class InvalidPermutation(NaclError, ValueError):
    pass


class NotIndexTwo(NaclError, ValueError):
    pass


class NotOrderTwo(NaclError, ValueError):
    pass


class NotSurjective(NaclError, ValueError):
    pass


class NotGood(NaclError, ValueError):
    pass


class NotOverC(NaclError, ValueError):
    pass


class NotCoprime(NaclError, ValueError):
    pass


class NotCommuting(NaclError, ValueError):
    pass


class ParityViolation(NaclError, ValueError):
    pass


class SubtractionMismatch(NaclError):
    """Ext factors were not a sub-multiset of the symmetric subgroup."""


class IncompleteEnumeration(NaclError):
    pass


class NonIntegralAverage(NaclError):
    pass


class InsufficientRange(NaclError, ValueError):
    pass


class InvariantViolation(NaclError):
    """A cross-check between two independent computations disagreed."""

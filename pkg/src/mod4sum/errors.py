"""Exception types raised across the package."""


class Mod4SumError(Exception):
    """Base class for package errors."""


class PromiseViolation(Mod4SumError, ValueError):
    """Inputs whose sum is odd; the task is undefined on them."""


class ChainFormatError(Mod4SumError, ValueError):
    """Malformed protocol table or chain text."""


class ResourceLimitError(Mod4SumError):
    """A requested search exceeds the configured size guard."""


class InconsistentBoundsError(Mod4SumError):
    """A lower bound exceeds an upper bound, which means an upstream bug."""


class DegenerateParameters(Mod4SumError, ValueError):
    """Noise parameters for which no detection efficiency can beat the classical rate."""

"""Exception hierarchy shared by the library and the CLI."""


class FairDivError(Exception):
    """Base class for every error raised by this package."""


class CapabilityError(FairDivError):
    """The request is outside what an operation supports (valuation class, size cap)."""


class ContractError(FairDivError, ValueError):
    """A precondition on the arguments does not hold."""


class ValidationError(FairDivError, ValueError):
    """An instance or allocation file failed validation."""


class InvariantError(FairDivError, RuntimeError):
    """A property that must always hold was observed to fail."""

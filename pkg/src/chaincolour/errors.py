"""Exception hierarchy shared by the library and the command line."""


class ChainColourError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ChainColourError, ValueError):
    """Bad arguments: mismatched ground sizes, malformed families, out-of-range parameters."""


class CapabilityError(ChainColourError, RuntimeError):
    """The request is well-formed but exceeds a size or budget cap."""


class PreconditionError(ChainColourError, ValueError):
    """An operation's mathematical precondition does not hold for the input."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class EngineFault(ChainColourError, RuntimeError):
    """Internal invariant breach inside the partition engine."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump


class VerificationFailure(ChainColourError):
    """A checked inequality or structural property came out false."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details

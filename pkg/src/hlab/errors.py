"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands live in spaces of different dimension."""


class CapExceeded(RuntimeError):
    """A combinatorial or cloud-size cap would be exceeded."""


class SpecFormatError(ValueError):
    """A system description file or dict is malformed."""


class UnknownIndex(KeyError):
    """A word letter does not index any map of the system."""


class MismatchBeyondDepth(ValueError):
    """Two word prefixes agree on every position up to their depth."""

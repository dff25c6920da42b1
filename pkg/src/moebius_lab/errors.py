"""Exception hierarchy shared by all modules."""


class MoebiusLabError(Exception):
    """Base class for errors raised by moebius_lab."""


class InvalidArgument(MoebiusLabError, ValueError):
    """A precondition on an argument was violated."""


class ResourceError(MoebiusLabError, MemoryError):
    """An allocation could not be satisfied."""

    def __init__(self, requested_bytes: int, what: str = "table"):
        self.requested_bytes = requested_bytes
        super().__init__(f"could not allocate {requested_bytes} bytes for {what}")


class NumericalFailure(MoebiusLabError, ArithmeticError):
    """A floating-point evaluation did not land within tolerance of its exact value."""


class CacheFormatError(MoebiusLabError, OSError):
    """A cache file is truncated or does not carry the expected header."""

"""Exception types shared by the codecs, the simulator and the CLI."""


class CodedMMError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(CodedMMError, ValueError):
    pass


class InvalidParameter(CodedMMError, ValueError):
    pass


class DuplicatePoint(CodedMMError, ValueError):
    pass


class EmptyInput(CodedMMError, ValueError):
    pass


class InsufficientWorkers(InvalidParameter):
    """Raised when a code is configured with fewer workers than its threshold."""

    def __init__(self, needed: int, got: int):
        super().__init__(f"code needs at least {needed} workers, got {got}")
        self.needed = needed
        self.got = got


class RecoveryThresholdNotMet(CodedMMError):
    """The fusion node received too few worker outputs to decode."""

    def __init__(self, needed: int, got: int):
        super().__init__(f"recovery threshold not met: needed {needed}, got {got}")
        self.needed = needed
        self.got = got


class CorrectnessViolation(CodedMMError):
    """A decoded product disagreed with the brute-force oracle."""

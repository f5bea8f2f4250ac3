"""Exception types shared across the package.

Each class marks one failure category so callers can react specifically
(bad arguments vs. corrupted state vs. numerical blow-up) instead of
catching bare ValueError everywhere.
"""


class InputError(ValueError):
    """An argument is malformed: wrong shape, out of range, or non-finite."""


class ConfigError(ValueError):
    """A configuration value or file is invalid or inconsistent."""


class StateError(RuntimeError):
    """An operation was called in a state that does not allow it."""


class NumericError(ArithmeticError):
    """A computation produced non-finite values or failed to converge."""


class StabilityError(RuntimeError):
    """An explicit solver step was requested beyond its stability limit."""


class FormatError(ValueError):
    """A serialized file (checkpoint, config) cannot be decoded."""


class CodecError(ValueError):
    """A wire message cannot be encoded or decoded.

    ``offset`` carries the byte position of the first offending character
    when known, else -1.
    """

    def __init__(self, message: str, offset: int = -1):
        super().__init__(message)
        self.offset = offset


class ProtocolError(RuntimeError):
    """The remote peer violated the message protocol."""

"""Exception hierarchy shared by every module."""


class OigLabError(Exception):
    """Base class for all errors raised by oiglab."""


class InputError(OigLabError, ValueError):
    """An argument violates an operation's precondition."""


class ParseError(InputError):
    """A class file is malformed. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(InputError):
    """An experiment or construction configuration is invalid."""


class CapacityError(OigLabError):
    """An exhaustive computation was requested on an instance that is too large."""


class RealizabilityError(OigLabError):
    """The training labels are not consistent with any hypothesis in the class."""


class ConstructionError(OigLabError):
    """The adversarial construction cannot be applied to this class or subset."""


class InvariantViolation(OigLabError, AssertionError):
    """A checked postcondition failed. Always indicates a bug."""

"""Exception hierarchy; the CLI maps each class to an exit code."""


class DestackifyError(Exception):
    exit_code = 1


class InputError(DestackifyError, ValueError):
    """Malformed or out-of-domain input."""

    exit_code = 2


class PreconditionError(InputError):
    """An operation was called on data violating its precondition."""


class UnsupportedInputError(InputError):
    """Input outside the supported model (e.g. non-invariant divisor lines)."""


class ResourceError(DestackifyError):
    """A configured resource cap would be exceeded."""

    exit_code = 3


class InvariantViolation(DestackifyError, AssertionError):
    """A post-condition check failed; no certificate is emitted."""

    exit_code = 4


class EngineError(DestackifyError):
    """A pluggable destackification engine emitted an invalid step."""

    exit_code = 4

"""Exception types shared across the package.

Everything data-dependent derives from SemvecError so the CLI can map
it to exit code 2; plain ValueError is reserved for caller mistakes
(bad k, bad policy name) that the CLI screens out as usage errors.
"""


class SemvecError(Exception):
    """Base class for failures caused by the data being processed."""


class FormatError(SemvecError):
    """Malformed input; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateTokenError(FormatError):
    """The same token appears twice in one embedding set."""


class UnknownTokenError(SemvecError):
    """A queried token is not in the vocabulary."""

    def __init__(self, token: str):
        super().__init__(f"unknown token: {token!r}")
        self.token = token


class ZeroVectorError(SemvecError):
    """An operation that needs a direction got an all-zero vector."""


class DimensionMismatchError(SemvecError):
    """Two vectors or spaces of different dimensionality were combined."""


class ConvergenceError(SemvecError):
    """An iterative solver hit its iteration cap before converging."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class EmptyInputError(SemvecError):
    """A nonempty collection was required but an empty one was given."""

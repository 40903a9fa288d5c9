"""Exception types shared across the package.

The CLI maps a few of these onto process exit codes, see ``cli.EXIT_CODES``.
"""


class InvalidArgument(ValueError):
    pass


class UnsupportedDimension(InvalidArgument):
    pass


class UnsupportedSubstitution(InvalidArgument):
    """Substitution whose images never grow along some axis."""


class ConfigError(InvalidArgument):
    pass


class PreconditionViolation(InvalidArgument):
    pass


class NoGlobalPath(RuntimeError):
    """Raised when a de Bruijn graph is not strongly connected."""


class SearchExhausted(RuntimeError):
    def __init__(self, message, tried=()):
        super().__init__(message)
        self.tried = list(tried)


class IterationCap(RuntimeError):
    pass


class NumericFailure(RuntimeError):
    pass


class DegenerateHopping(NumericFailure):
    """A hopping value vanished where the transfer-matrix method needs it nonzero."""


class GateFailure(RuntimeError):
    """A candidate approximant seed failed a legality gate."""

"""Exception hierarchy shared by all modules."""


class SymbidiscError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(SymbidiscError, ValueError):
    pass


class DomainError(SymbidiscError, ValueError):
    pass


class CommutationError(SymbidiscError, ValueError):
    pass


class ConvergenceError(SymbidiscError, RuntimeError):
    pass


class SymmetryError(SymbidiscError, ValueError):
    pass


class UnsupportedDivisorError(SymbidiscError, ValueError):
    pass


class NumericalFailure(SymbidiscError, RuntimeError):
    pass


class HypothesisError(SymbidiscError, ValueError):
    """A theorem hypothesis checked at runtime does not hold."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ParseError(SymbidiscError, ValueError):
    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class UsageError(SymbidiscError, ValueError):
    pass

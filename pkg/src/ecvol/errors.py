"""Exception hierarchy. Every error raised on purpose derives from EcvolError."""


class EcvolError(Exception):
    """Base class for toolkit errors."""

    category = "error"


class InvalidParameterError(EcvolError, ValueError):
    category = "parameter"


class DomainError(EcvolError, ValueError):
    """Argument outside the support of a density."""

    category = "domain"


class QuadratureError(EcvolError, ArithmeticError):
    category = "numeric"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FilterError(EcvolError, ArithmeticError):
    """Variance recursion produced a nonpositive or nonfinite value."""

    category = "numeric"

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class LikelihoodError(EcvolError, ArithmeticError):
    category = "numeric"

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class EstimationError(EcvolError, RuntimeError):
    category = "estimation"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class InputError(EcvolError, ValueError):
    category = "input"


class CsvParseError(InputError):
    def __init__(self, message, lines=()):
        super().__init__(message)
        self.lines = tuple(lines)


class ComparisonError(EcvolError, ValueError):
    category = "comparison"

"""Exception hierarchy shared by the solver, the harness and the CLI."""


class TumorPenError(Exception):
    """Base class for every error raised by this package."""


class GridError(TumorPenError, ValueError):
    pass


class InvalidDimension(GridError):
    pass


class InvalidResolution(GridError):
    pass


class WidthTooSmall(TumorPenError, ValueError):
    pass


class NumericalError(TumorPenError, ArithmeticError):
    """Raised when a field leaves the admissible set during a run."""


class NegativeCoefficient(NumericalError):
    pass


class NegativeDensity(NumericalError):
    pass


class NutrientOutOfRange(NumericalError):
    pass


class CFLViolation(NumericalError):
    pass


class MomentumInVacuum(NumericalError):
    pass


class InstabilityDetected(NumericalError):
    pass


class MaxPrincipleViolated(NumericalError):
    pass


class ConfigError(TumorPenError, ValueError):
    pass


class ConfigParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class ConfigValidationError(ConfigError):
    def __init__(self, rule, message):
        self.rule = rule
        super().__init__(f"{rule}: {message}")

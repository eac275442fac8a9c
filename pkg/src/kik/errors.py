"""
Exception hierarchy.

Everything raised on purpose by the package derives from ``KikError``.
``ConfigError`` covers bad inputs and configs (CLI exit code 2),
``NumericalError`` covers numerical failures (CLI exit code 3).
"""


class KikError(Exception):
    pass


class ConfigError(KikError, ValueError):
    pass


class NumericalError(KikError, ArithmeticError):
    pass


# input validation

class NonHermitianInput(ConfigError):
    pass


class NegativeRate(ConfigError):
    pass


class InvalidPauliString(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class NotQubitDimension(ConfigError):
    pass


class NotDensityMatrix(ConfigError):
    pass


class InvalidSchedule(ConfigError):
    pass


class InvalidSpec(ConfigError):
    pass


class OrderTooLarge(ConfigError):
    pass


class UnsupportedOrder(ConfigError):
    pass


class OutOfRangeG(ConfigError):
    pass


class OutOfRange(ConfigError):
    pass


class BudgetTooSmall(ConfigError):
    pass


class NotDiagonalObservable(ConfigError):
    pass


class UnsupportedLogicalUnitary(ConfigError):
    pass


class RegressionDegenerate(ConfigError):
    pass


# numerical failures

class SingularPTM(NumericalError):
    pass


class ExponentialDidNotConverge(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class BranchCutViolation(NumericalError):
    pass


class IllConditionedSystem(NumericalError):
    pass


class SingularMeasurementMatrix(NumericalError):
    pass

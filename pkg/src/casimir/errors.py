"""Exception hierarchy.

Everything derives from :class:`CasimirError` so callers (the CLI in
particular) can separate configuration problems from numerical failures.
"""


class CasimirError(Exception):
    pass


class InvalidInput(CasimirError, ValueError):
    """Bad arguments to a numerical routine."""


class NonPositiveFrequency(InvalidInput):
    pass


class NonPositiveTemperature(InvalidInput):
    pass


class TemperatureAboveCritical(InvalidInput):
    pass


class InvalidModelParameters(InvalidInput):
    pass


class InvalidRRR(InvalidInput):
    pass


class InvalidWavevector(InvalidInput):
    pass


class GeometryInvalid(InvalidInput):
    pass


class NumericalError(CasimirError, ArithmeticError):
    """A numerical procedure did not reach its requested accuracy."""


class QuadratureNotConverged(NumericalError):
    pass


class TruncationNotConverged(NumericalError):
    pass


class ExtrapolationNotConverged(NumericalError):
    pass


class ConfigError(CasimirError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnknownKey(ConfigError):
    pass


class MissingUnit(ConfigError):
    pass

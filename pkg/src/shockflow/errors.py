"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for bad input or
configuration, 3 for a scenario outside the model's valid region, 4 when an
analysis cannot be carried out on the given series.
"""


class ShockflowError(ValueError):
    exit_code = 2


# -- input / configuration (exit 2) -----------------------------------------

class InputError(ShockflowError):
    exit_code = 2


class EmptyInput(InputError):
    pass


class NonMonotonicDates(InputError):
    pass


class DegenerateSeries(InputError):
    pass


class MissingRegime(InputError):
    pass


class ZeroLengthSchedule(InputError):
    pass


class InvalidSchedule(InputError):
    pass


class ZeroExpenses(InputError):
    pass


class EmptySector(InputError):
    pass


class LengthMismatch(InputError):
    pass


class InvalidGridValue(InputError):
    pass


class TooShort(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class ConfigError(InputError):
    pass


class ParseError(InputError):
    """Malformed input file. ``line`` is 1-based and counts the header."""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


# -- model domain (exit 3) --------------------------------------------------

class NonPositivePrice(ShockflowError):
    exit_code = 3

    def __init__(self, message, day=None):
        self.day = day
        super().__init__(message if day is None else f"day {day}: {message}")


# -- analysis domain (exit 4) -----------------------------------------------

class AnalysisError(ShockflowError):
    exit_code = 4


class NotOscillatory(AnalysisError):
    pass


class EmptyValidRange(AnalysisError):
    pass


class ZeroVarianceSource(AnalysisError):
    pass


class NoTroughFound(AnalysisError):
    pass


class NoOscillatoryMode(AnalysisError):
    pass

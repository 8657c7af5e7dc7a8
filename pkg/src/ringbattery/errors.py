"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so sweep rows and the
CLI can report failures without string matching.
"""


class BatteryError(ValueError):
    code = "error"


class InvalidGeometryError(BatteryError):
    code = "invalid-geometry"


class ModeIndexError(BatteryError, IndexError):
    code = "mode-index"


class InvalidParameterError(BatteryError):
    code = "invalid-parameter"


class InvalidFrequencyError(BatteryError):
    code = "invalid-frequency"


class InvalidTemperatureError(BatteryError):
    code = "invalid-temperature"


class InvalidRateError(BatteryError):
    code = "invalid-rate"


class InvalidLadderError(BatteryError):
    code = "invalid-ladder"


class NumericError(BatteryError, ArithmeticError):
    code = "numeric"


class IntegrationError(BatteryError):
    code = "integration-failure"

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class PositivityError(IntegrationError):
    code = "positivity"


class NonUniqueSteadyStateError(BatteryError):
    code = "non-unique-steady-state"


class UndefinedImbalanceError(BatteryError):
    code = "undefined-imbalance"


class NormalizationError(BatteryError):
    code = "normalization"


class ConfigError(BatteryError):
    code = "config"

    def __init__(self, section, key, constraint):
        self.section = section
        self.key = key
        self.constraint = constraint
        where = f"[{section}]" if key is None else f"[{section}] {key}"
        super().__init__(f"{where}: {constraint}")


class NonphysicalGainWarning(UserWarning):
    """A resolved decay width came out negative (the mode amplifies)."""

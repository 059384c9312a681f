"""Error types raised by the toolkit.

Every error carries a short machine-readable ``code`` so the CLI can map
failures to diagnostics without parsing messages.
"""


class ElastoInverseError(Exception):
    """Base class for all toolkit errors."""

    code = "ERROR"

    def __init__(self, message: str):
        super().__init__(f"{self.code}: {message}")
        self.message = message


class NonDivisibleLengthError(ElastoInverseError):
    code = "NON_DIVISIBLE_LENGTH"


class PointOutsideError(ElastoInverseError):
    code = "POINT_OUTSIDE"


class NoNodeError(ElastoInverseError):
    code = "NO_NODE"


class DegenerateElementError(ElastoInverseError):
    code = "DEGENERATE_ELEMENT"


class SingularFError(ElastoInverseError):
    code = "SINGULAR_F"


class SingularBlockError(ElastoInverseError):
    code = "SINGULAR_BLOCK"


class SingularMassError(ElastoInverseError):
    code = "SINGULAR_MASS"


class NonFiniteError(ElastoInverseError):
    code = "NON_FINITE"


class SingularAError(ElastoInverseError):
    code = "SINGULAR_A"


class DimensionMismatchError(ElastoInverseError):
    code = "DIMENSION_MISMATCH"


class UnknownSensorError(ElastoInverseError):
    code = "UNKNOWN_SENSOR"


class SingularGainError(ElastoInverseError):
    code = "SINGULAR_GAIN"


class TooLargeError(ElastoInverseError):
    code = "TOO_LARGE"


class ConfigError(ElastoInverseError):
    code = "CONFIG"

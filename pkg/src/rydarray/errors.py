"""Exception hierarchy shared across the package."""


class RydArrayError(Exception):
    """Base class for all package-specific errors."""


class SingularSystem(RydArrayError):
    """The constrained steady-state linear system is rank-deficient.

    Usually signals an unphysical parameter set, e.g. no decay or dephasing
    anywhere in the level scheme.
    """


class NonpositiveNoise(RydArrayError):
    """SNR requested with a noise power that is not strictly positive."""


class NoCrossing(RydArrayError):
    """An SNR curve never crosses the bandwidth threshold from above."""


class BadSlope(RydArrayError):
    """A bandwidth scaling law was requested with a non-negative slope."""


class InsufficientPoints(RydArrayError):
    """Too few samples inside the requested fit window."""


class CalibrationDiverged(RydArrayError):
    """Noise-model calibration left an anchor with a large residual."""


class ParseError(RydArrayError):
    """Malformed table file.  Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(RydArrayError):
    """Invalid or unknown configuration key.  Carries the key name."""

    def __init__(self, message: str, key: str = ""):
        super().__init__(message)
        self.key = key

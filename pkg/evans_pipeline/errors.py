"""Exception hierarchy shared by the library and the command-line tasks.

Configuration problems exit with status 2, numerical failures with status 3.
"""


class EvansError(Exception):
    """Base class for every error raised by evans_pipeline."""

    exit_code = 1


class ConfigError(EvansError, ValueError):
    """Bad user input: flags, parameters, files."""

    exit_code = 2


class ModelDomainError(ConfigError):
    """Model parameter outside its admissible range."""


class ProfileFormatError(ConfigError):
    """Malformed tabulated wave profile."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(EvansError, ArithmeticError):
    """A computation could not be completed.

    `lam` is the spectral parameter the failure belongs to, when known.
    """

    exit_code = 3

    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class LinalgError(NumericalError):
    pass


class SingularSystemError(LinalgError):
    pass


class PropagationOverflow(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class SectorError(NumericalError):
    """Stiff expansion requested outside the sector Re(h*kappa) >= 5."""


class InadmissibleError(EvansError, ValueError):
    """Spectral parameter for which the decaying solutions are not defined."""

    exit_code = 2

class LatentQcdError(Exception):
    def __init__(self, message="LatentQCD Error"):
        super().__init__(message)
        self.message = message


class ConfigError(LatentQcdError):
    def __init__(self, message="Invalid Configuration"):
        super().__init__(message)


class DataError(LatentQcdError):
    def __init__(self, message="Invalid Data"):
        super().__init__(message)


class NumericalError(LatentQcdError):
    def __init__(self, message="Numerical Failure"):
        super().__init__(message)


class InvalidSpecError(ConfigError, ValueError):
    def __init__(self, message="Invalid Specification"):
        super().__init__(message)


class UnknownPresetError(ConfigError, KeyError):
    def __init__(self, message="Unknown Preset"):
        super().__init__(message)

    def __str__(self) -> str:
        return self.message


class BracketingError(ConfigError, ValueError):
    def __init__(self, message="Threshold Bracket Does Not Contain Target"):
        super().__init__(message)


class DegenerateFitError(DataError, ValueError):
    def __init__(self, message="Degenerate Fit"):
        super().__init__(message)


class DegenerateSampleError(DataError, ValueError):
    def __init__(self, message="Degenerate Sample"):
        super().__init__(message)


class NonFiniteValueError(DataError, ValueError):
    def __init__(self, message="Non-finite Value"):
        super().__init__(message)


class LengthMismatchError(DataError, ValueError):
    def __init__(self, message="Length Mismatch"):
        super().__init__(message)


class MalformedLogError(DataError, ValueError):
    def __init__(self, message="Malformed Log File"):
        super().__init__(message)


class IndistinguishableScenarioError(DataError):
    def __init__(self, message="Pre- and post-change models are indistinguishable"):
        super().__init__(message)


class ConvergenceError(NumericalError):
    def __init__(self, message="Eigen-decomposition did not converge"):
        super().__init__(message)


class FalseAlarmDominatedError(NumericalError):
    def __init__(self, message="Majority of runs alarmed before the changepoint"):
        super().__init__(message)


class AlarmedDetectorError(LatentQcdError):
    def __init__(self, message="Detector already alarmed, reset it before stepping"):
        super().__init__(message)


def exit_code(error: Exception) -> int:
    """Maps an exception to the command line exit code.

    Args:
        error (Exception): The raised exception.

    Returns:
        int: 2 for configuration errors, 3 for data errors, 4 for numerical failures and 1 otherwise.
    """
    if isinstance(error, ConfigError):
        return 2
    if isinstance(error, DataError):
        return 3
    if isinstance(error, NumericalError):
        return 4
    return 1

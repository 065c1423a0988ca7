"""Exception hierarchy shared by all hardylab modules."""


class HardyLabError(Exception):
    """Base class for every error raised by hardylab."""


class InvalidInputError(HardyLabError, ValueError):
    pass


class IncompatibleSpecError(HardyLabError, ValueError):
    """A quasi-norm was paired with a group whose dilations it is not homogeneous for."""


class GeometryConfigError(HardyLabError):
    """The declared bounding box does not contain the unit quasi-ball."""


class InadmissibleParametersError(HardyLabError, ValueError):
    def __init__(self, message: str, condition: str | None = None):
        super().__init__(message)
        self.condition = condition


class NumericError(HardyLabError, ArithmeticError):
    pass


class DegenerateInputError(HardyLabError, ValueError):
    pass


class SamplingError(HardyLabError):
    pass


class ConvergenceError(HardyLabError):
    def __init__(self, message: str, last_value: float | None = None):
        super().__init__(message)
        self.last_value = last_value


class InadmissibleFamilyError(HardyLabError, ValueError):
    pass

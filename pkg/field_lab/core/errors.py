class FieldLabError(Exception):
    """Base class for every error raised by the laboratory."""


class InvalidInputError(FieldLabError, ValueError):
    """An input was rejected before any computation took place."""


class GridMismatchError(InvalidInputError):
    pass


class NotTransverseError(InvalidInputError):
    pass


class CFLViolationError(InvalidInputError):
    def __init__(self, dt, limit):
        self.dt = dt
        self.limit = limit
        super().__init__(
            f"time step dt={dt!r} violates the CFL condition c*dt < h/sqrt(3); "
            f"dt must stay strictly below {limit!r}"
        )


class UnknownPresetError(InvalidInputError):
    pass


class ConfigError(InvalidInputError):
    pass


class SourceError(InvalidInputError):
    pass


class EvaluationFailure(FieldLabError):
    pass


class AlgebraViolationError(FieldLabError):
    pass


class ConstraintViolationError(FieldLabError):
    pass

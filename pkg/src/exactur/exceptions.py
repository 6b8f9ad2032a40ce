"""Exception and warning classes raised across the package."""


class UnitRootError(ValueError):
    """Base class for all errors raised by exactur."""


class ParseError(UnitRootError):
    def __init__(self, line: int, token: str):
        self.line = line
        self.token = token
        super().__init__(f"cannot parse {token!r} on line {line}")


class EmptySeries(UnitRootError):
    pass


class SeriesTooShort(UnitRootError):
    pass


class DegenerateSeries(UnitRootError):
    pass


class NumericalFailure(UnitRootError):
    pass


class DomainError(UnitRootError):
    pass


class TauUndefined(UnitRootError):
    pass


class InvalidSpec(UnitRootError):
    pass


class DegenerateFunctional(UnitRootError):
    pass


class UnsupportedLevel(UnitRootError):
    pass


class LengthOutOfRange(UnitRootError):
    pass


class SingularDesign(UnitRootError):
    pass


class SingularRegression(UnitRootError):
    pass


class DegenerateResiduals(UnitRootError):
    pass


class TooFewLags(UnitRootError):
    pass


class TooManyDegenerate(UnitRootError):
    """Raised when a simulation loses 0.1% or more of its replications."""


class DegenerateRegressionWarning(RuntimeWarning):
    """Zero-residual regression; the statistic was set to 0."""

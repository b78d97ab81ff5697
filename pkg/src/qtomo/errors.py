"""Exception hierarchy shared by all qtomo modules."""


class QTomoError(Exception):
    """Base class for every error raised by qtomo."""


class ValidationError(QTomoError, ValueError):
    """An input violates a documented precondition."""


class NotHermitian(ValidationError):
    pass


class TraceNotOne(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class WrongDimension(ValidationError):
    pass


class UnknownLabel(ValidationError):
    pass


class ParameterOutOfRange(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class DegenerateParams(ValidationError):
    """Parameter vector maps to a (numerically) zero matrix."""


class ConfigError(ValidationError):
    """Malformed sweep / anneal configuration."""


class NumericalConsistencyError(QTomoError, ArithmeticError):
    """A result that is impossible for valid inputs, signalling corrupted numerics."""

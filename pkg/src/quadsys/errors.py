"""Exception hierarchy shared by all quadsys modules."""


class QuadsysError(Exception):
    """Base class for every error raised by this package."""


class ZeroInverse(QuadsysError, ZeroDivisionError):
    pass


class NonUnit(QuadsysError, ZeroDivisionError):
    pass


class DimensionMismatch(QuadsysError, ValueError):
    pass


class FieldMismatch(QuadsysError, ValueError):
    pass


class SingularTransform(QuadsysError, ValueError):
    pass


class NonIntegral(QuadsysError, ValueError):
    pass


class TooLarge(QuadsysError):
    pass


class BudgetExhausted(QuadsysError):
    pass


class PreconditionViolated(QuadsysError, ValueError):
    pass


class WitnessInvalid(QuadsysError, ValueError):
    pass


class SingularSeed(QuadsysError, ValueError):
    pass


class DegenerateSystem(QuadsysError, ValueError):
    pass


class NotAZero(QuadsysError, ValueError):
    pass


class ZeroArgument(QuadsysError, ValueError):
    pass


class BadFieldSpec(QuadsysError, ValueError):
    """Invalid field description (composite p, reducible modulus, ...)."""


class FormatError(QuadsysError, ValueError):
    """A .qfs parse error carrying a 1-based line/column position."""

    kind = "SyntaxError"

    def __init__(self, message, line=0, col=0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{self.kind} at line {line}, column {col}: {message}")


class QFSSyntaxError(FormatError):
    kind = "SyntaxError"


class NonHomogeneous(FormatError):
    kind = "NonHomogeneous"


class UnknownVariable(FormatError):
    kind = "UnknownVariable"


class BadField(FormatError):
    kind = "BadField"

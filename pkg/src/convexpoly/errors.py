"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class ConvexPolyError(Exception):
    code = "E000"


# polycore
class EmptyInput(ConvexPolyError, ValueError):
    code = "E101"


class NegativeCoefficient(ConvexPolyError, ValueError):
    code = "E102"


class ZeroMass(ConvexPolyError, ValueError):
    code = "E103"


class MassMismatch(ConvexPolyError, ValueError):
    code = "E104"


class DegreeOverflow(ConvexPolyError, OverflowError):
    code = "E105"


# peaking
class NotBelowMinusOne(ConvexPolyError, ValueError):
    code = "E201"


class SearchExhausted(ConvexPolyError, RuntimeError):
    code = "E202"


class BadEndpoints(ConvexPolyError, ValueError):
    code = "E203"


class DegenerateAlpha(ConvexPolyError, ArithmeticError):
    code = "E204"


# measures
class NonFiniteSample(ConvexPolyError, ArithmeticError):
    code = "E301"


class CommonDiscontinuity(ConvexPolyError, ValueError):
    code = "E302"


class HypothesisFailed(ConvexPolyError, ValueError):
    code = "E303"


class ExtractionFailed(ConvexPolyError, RuntimeError):
    code = "E304"


class InvalidMeasure(ConvexPolyError, ValueError):
    code = "E305"


# approx
class NonPSDModel(ConvexPolyError, ValueError):
    code = "E401"


class Infeasible(ConvexPolyError, RuntimeError):
    code = "E402"


class RangeOverflow(ConvexPolyError, OverflowError):
    code = "E403"


class SupportViolation(ConvexPolyError, ValueError):
    code = "E404"


class WeightVanishes(ConvexPolyError, ValueError):
    code = "E405"


# series
class BadParameter(ConvexPolyError, ValueError):
    code = "E501"


class UnsupportedComposition(ConvexPolyError, TypeError):
    code = "E502"


class BadDomain(ConvexPolyError, ValueError):
    code = "E503"


# cyclic
class ZeroVector(ConvexPolyError, ValueError):
    code = "E601"


# cli / expressions
class ExpressionSyntaxError(ConvexPolyError, SyntaxError):
    code = "E701"

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at offset {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class ExpressionEvalError(ConvexPolyError, ArithmeticError):
    code = "E702"

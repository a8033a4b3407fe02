"""Exception hierarchy.

Input problems derive from :class:`SpecError` (CLI exit code 2), numerical
failures from :class:`NumericError` (exit code 3).
"""


class HeatWienerError(Exception):
    pass


class SpecError(HeatWienerError, ValueError):
    pass


class SpecParseError(SpecError):
    pass


class NegativeWeight(SpecError):
    pass


class MassNotOne(SpecError):
    def __init__(self, deviation: float, message: str | None = None):
        self.deviation = deviation
        super().__init__(message or f"total mass deviates from 1 by {deviation:.3g}")


class PointOutsideDomain(SpecError):
    pass


class UnsupportedVariantForGeometry(SpecError):
    pass


class UnsupportedVariant(SpecError):
    pass


class NumericError(HeatWienerError, ArithmeticError):
    pass


class TailBoundUnavailable(NumericError):
    def __init__(self, t: float, message: str = ""):
        self.t = t
        super().__init__(f"cannot certify spectral tail at t={t!r}" + (f": {message}" if message else ""))


class NonfiniteTerm(NumericError):
    pass


class TooFewSamples(NumericError):
    pass


class ResolutionTooLow(NumericError):
    pass


class OrderCapExceeded(NumericError):
    pass


class TruncationFailure(NumericError):
    pass


class QuadratureBudgetExceeded(NumericError):
    pass

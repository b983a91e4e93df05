"""Exception hierarchy shared by all finpart modules."""


class FinpartError(ValueError):
    """Base class for domain errors raised by finpart."""


class UnknownFunction(FinpartError):
    pass


class ContourHitsSingularity(FinpartError):
    pass


class InvalidContour(FinpartError):
    pass


class PoleOnContour(InvalidContour):
    pass


class NotDivergent(FinpartError):
    pass


class DegenerateBranch(FinpartError):
    pass


class ExpansionInvalid(FinpartError):
    pass


class TailDivergent(FinpartError):
    pass


class GammaPole(FinpartError):
    pass


class QuadratureFailure(FinpartError):
    """Adaptive quadrature ran out of subdivisions.

    The best available estimate is kept on ``best`` so callers can still
    inspect it.
    """

    def __init__(self, message, best=None, abs_error_estimate=None):
        super().__init__(message)
        self.best = best
        self.abs_error_estimate = abs_error_estimate

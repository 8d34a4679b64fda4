"""Exception types shared across the package."""


class FreqlockError(Exception):
    """Base class for numerical and validation failures."""


class InvalidParams(FreqlockError):
    pass


class NoConvergence(FreqlockError):
    pass


class StepUnderflow(FreqlockError):
    pass


class DegenerateWeight(FreqlockError):
    pass


class SingularitySpacing(FreqlockError):
    pass


class CrossCheckFailure(FreqlockError):
    pass


class DegenerateExtremum(FreqlockError):
    pass


class CompatibilityViolated(FreqlockError):
    pass


class NoBracket(FreqlockError):
    pass


class TooFewPoints(FreqlockError):
    pass


class NewtonDiverged(FreqlockError):
    pass

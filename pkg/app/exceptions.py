from builtins import ValueError


class BifurcationError(ValueError):
    """Base class for every error raised by the toolkit."""


class NonzeroRemainder(BifurcationError):
    """A claimed exact factorization left a nonzero remainder."""


class PeriodCapExceeded(BifurcationError):
    pass


class UnknownFamily(BifurcationError):
    pass


class MissingFixedParam(BifurcationError):
    pass


class FamilySpecError(BifurcationError):
    """The family mini-format string could not be parsed."""


class DegenerateConjugacy(BifurcationError):
    """The affine conjugacy collapses to a constant map."""


class ExactnessRequired(BifurcationError):
    """The operation needs rational inputs, or a sign that interval refinement cannot settle."""


class LeadingCoefficientVanishes(BifurcationError):
    pass


class NoConvergence(BifurcationError):
    pass


class DerivativeNearZero(BifurcationError):
    """Newton met a nearly flat f^n - id; the orbit is close to a tangency."""


class StartNotConverged(BifurcationError):
    pass


class CountsEqualAtEndpoints(BifurcationError):
    pass


class EmptyDataset(BifurcationError):
    pass

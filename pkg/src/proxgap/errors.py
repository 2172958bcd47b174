"""Exception hierarchy shared by every module."""


class ProxGapError(Exception):
    """Base class for all library errors."""


class InvalidLattice(ProxGapError):
    pass


class NotAQuadricOfInterest(ProxGapError):
    """More than one nonpositive eigenvalue, so none of the supported shapes."""


class AssumptionViolated(ProxGapError):
    """A structural assumption (trivial lineality, unique optimum, ...) fails."""


class WrongQuadricClass(ProxGapError):
    pass


class InvalidBranch(ProxGapError):
    pass


class NoFullDimRecessionCone(ProxGapError):
    pass


class NoLargeBalls(ProxGapError):
    pass


class InfeasibleAnchor(ProxGapError):
    pass


class InvalidRegularizer(ProxGapError):
    pass


class PreconditionViolated(ProxGapError):
    pass


class InfeasibleSet(ProxGapError):
    pass


class Unbounded(ProxGapError):
    pass


class InvalidObjective(ProxGapError):
    pass


class BoundNotApplicable(ProxGapError):
    pass


class InfeasibleIntegerSet(ProxGapError):
    pass


class CannotCertifyBox(ProxGapError):
    pass


class BudgetExceeded(CannotCertifyBox):
    """The enumeration budget ran out before the search was certified."""

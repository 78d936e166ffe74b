"""Exception types shared across the library."""


class AbelavError(Exception):
    """Base class for all library errors."""


class InputError(AbelavError):
    """Malformed user input: bad map specification, flag, or file."""


class SingularResolvent(AbelavError):
    """I - alpha*T (or I - alpha*h'(0)) is numerically singular."""


class SingularJacobian(AbelavError):
    """Newton Jacobian I - alpha*h'(y) is numerically singular."""


class EigensolverFailure(AbelavError):
    """Dense eigenvalue iteration failed to converge."""


class Overflow(AbelavError):
    """Matrix powers exceeded the blow-up threshold; signals divergence."""


class OutsideBall(AbelavError):
    """A point expected inside the open unit ball has norm >= 1."""


class DomainEscape(AbelavError):
    """An evaluation or solve left the open unit ball.

    For the nonlinear resolvent this signals that the average of the map
    does not send the offending point back into the ball, i.e. a
    pseudo-contractivity failure at that point.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NoConvergence(AbelavError):
    """An iterative solve exhausted its budget without meeting tolerance."""


class OriginNotFixed(AbelavError):
    """Operation requires h(0) = 0 but the map moves the origin."""


class AuditFailure(AbelavError):
    """A retraction audit clause failed.

    Attributes
    ----------
    clause : str
        Which audit clause failed ("idempotence", "membership",
        "hyperbolic_contraction", or "convergence").
    witness : object
        The probe or pair of probes violating the clause.
    """

    def __init__(self, clause, witness, message):
        super().__init__(message)
        self.clause = clause
        self.witness = witness

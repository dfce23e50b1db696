"""Exception types raised by the estimation engine."""


class Su11BoundsError(Exception):
    """Base class for all errors raised by this package."""


class ModelNotIdentifiable(Su11BoundsError, ValueError):
    """The quantum Fisher information matrix is singular."""

    def __init__(self, message="model not identifiable"):
        super().__init__(message)


class InfeasibleConstraints(Su11BoundsError, ValueError):
    """No operator tuple satisfies the local unbiasedness conditions."""

    def __init__(self, message="locally unbiased estimator does not exist"):
        super().__init__(message)


class ParametersNotIdentifiable(Su11BoundsError, ValueError):
    """The outcome-mean Jacobian of a measurement scheme is rank deficient."""

    def __init__(self, message="parameters not jointly identifiable under this scheme"):
        super().__init__(message)


class SchemeError(Su11BoundsError, ValueError):
    """A measurement scheme is physically inconsistent."""


class InvalidState(Su11BoundsError, ValueError):
    """Mean/covariance data do not describe a valid Gaussian state."""

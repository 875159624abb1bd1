"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, SolverError and its
subclasses -> 3, InfeasibleError -> 4.
"""


class EcfmError(Exception):
    """Base class for all package errors."""


class ConfigError(EcfmError):
    """Invalid or inconsistent experiment configuration."""


class SolverError(EcfmError):
    """Base class for numerical solver failures."""


class SingularJacobianError(SolverError):
    """A linear solve failed because the operator is (numerically) singular."""


class SingularAugmentedSystemError(SingularJacobianError):
    """The augmented (state + constraint force) operator is singular."""


class MaxIterationsError(SolverError):
    """An iterative solver exhausted its iteration budget.

    Carries the last iterate and residual norm for diagnostics.
    """

    def __init__(self, message, x=None, residual_norm=None):
        super().__init__(message)
        self.x = x
        self.residual_norm = residual_norm


class InconsistentInitialDataError(SolverError):
    """Measurement data at t=0 disagrees with the projected initial condition."""


class NonFiniteGradientError(SolverError):
    """An optimizer received a non-finite gradient.

    Carries the partial optimization result accumulated so far.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class InfeasibleError(EcfmError):
    """A constrained program terminated without a feasible point."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations

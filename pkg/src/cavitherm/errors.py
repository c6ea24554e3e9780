"""Exception types raised by the simulation pipeline.

Each exception marks a distinct, physically meaningful failure mode so that
sweep drivers can record it per grid point instead of aborting the run.
"""


class CavithermError(Exception):
    """Base class for all pipeline failures."""


class LogBranchError(CavithermError):
    """A real matrix logarithm does not exist on the principal branch.

    Raised when the matrix has an eigenvalue on the closed negative real
    axis (including zero), or when the computed logarithm fails its
    round-trip accuracy check.
    """


class IntegratorNoConvergence(CavithermError):
    """Step-doubling did not reach the requested tolerance within budget."""


class NoUniqueFixedPoint(CavithermError):
    """The cell map is not a strict contraction; no unique asymptotic state."""


class GroundStateDivergence(CavithermError):
    """A thermality measure diverges because the state is too close to vacuum."""


class PopulationInversion(CavithermError):
    """Excited-state population exceeds a lower one; no positive temperature."""


class CutoffNotConverged(CavithermError):
    """Truncated number-basis evolution is not converged in the cutoff."""


class QuadratureError(CavithermError):
    """Adaptive quadrature reported an error estimate above tolerance."""

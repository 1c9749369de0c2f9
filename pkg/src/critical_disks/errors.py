"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CriticalDisksError(Exception):
    """Base class for every error raised by the package."""


# densities
class DomainError(CriticalDisksError, ValueError):
    """Argument outside the domain of a density."""


class NonSmoothError(CriticalDisksError, ValueError):
    """Requested derivative does not exist at this point."""


class QuadratureError(CriticalDisksError):
    """Quadrature could not reach the requested tolerance."""


# curves
class StepFailure(CriticalDisksError):
    """Adaptive step control could not meet the tolerance."""


class NoRoot(CriticalDisksError):
    """No admissible root found (or the equation is degenerate)."""


# surfaces
class AxisError(CriticalDisksError, ValueError):
    """Operation undefined on the axis of rotation (r <= 0)."""


class DegenerateProfile(CriticalDisksError, ValueError):
    """Profile returns to the axis in the interior."""


# residuals
class DifferentiationError(CriticalDisksError):
    """Numerical derivative failed its Richardson consistency check."""


class SingularG(CriticalDisksError, ValueError):
    """G = Lambda'/kappa requested at kappa = 0."""


class InfeasibleCap(CriticalDisksError):
    """The boundary circle does not fit on the sphere."""


class BranchError(CriticalDisksError, ValueError):
    """No branch of the cap classification applies."""


# solver
class DegenerateDensity(CriticalDisksError, ValueError):
    """Second derivative of the density vanishes."""


class VerticalTangent(CriticalDisksError):
    """The reduced right-hand side is singular at cos(phi) = 0."""


class ConservationFailure(CriticalDisksError):
    """First-integral drift exceeded its tolerance."""


class BlowUp(CriticalDisksError):
    """Curvature diverged during integration."""


class CollapseToAxis(CriticalDisksError):
    """The profile returned to the axis."""


class NoConvergence(CriticalDisksError):
    """Shooting iteration did not converge."""

    def __init__(self, message: str, trace=None, events=None):
        super().__init__(message)
        self.trace = list(trace or [])
        self.events = list(events or [])


class SingularBC(CriticalDisksError):
    """Boundary conditions are singular (kappa_n = 0 on a geodesic circle)."""


class RegimeViolation(CriticalDisksError):
    """Converged point lies outside the assumed boundary regime."""


class NearSpontaneous(CriticalDisksError):
    """H comes too close to the spontaneous curvature."""


# special solutions
class BranchStall(CriticalDisksError):
    """First-integral branch is degenerate (chi' vanishes identically)."""


class AxisSingularity(CriticalDisksError, ValueError):
    """Formula is singular on the axis."""

"""Surface densities P(H), boundary densities Lambda(kappa) and total energy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, NonSmoothError

LOG_SQUARE_MIN = 1e-12


@dataclass(frozen=True)
class PWillmore:
    """P(H) = sigma (H - c0)^p."""

    sigma: float
    c0: float = 0.0
    p: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError("sigma must be a positive real")
        if not (math.isfinite(self.p) and self.p >= 0):
            raise DomainError("p must be a real exponent >= 0")
        if not math.isfinite(self.c0):
            raise DomainError("c0 must be finite")


@dataclass(frozen=True)
class ExpSquare:
    """P(H) = exp(H^2)."""


@dataclass(frozen=True)
class LogSquare:
    """P(H) = log(H^2); defined for H != 0."""


@dataclass(frozen=True)
class Polynomial:
    """sum_k a_k x^k, coefficients in ascending order."""

    coefficients: tuple[float, ...] = field(default=(0.0,))

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise DomainError("Polynomial needs at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)


@dataclass(frozen=True)
class Quadratic:
    """Lambda(kappa) = kappa^2."""


@dataclass(frozen=True)
class TotalCurvature:
    """Lambda(kappa) = alpha kappa - beta0."""

    alpha: float
    beta0: float = 0.0


DensitySpec = Union[PWillmore, ExpSquare, LogSquare, Polynomial]
CurveDensitySpec = Union[Quadratic, TotalCurvature, Polynomial]


def _check_order(order: int) -> int:
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0, 1, 2 or 3")
    return order


def _falling(p: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= p - j
    return out


def _pwillmore(spec: PWillmore, H: np.ndarray, order: int) -> np.ndarray:
    x = H - spec.c0
    p = float(spec.p)
    coef = spec.sigma * _falling(p, order)
    if p.is_integer():
        if order > p:
            return np.zeros_like(x)
        return coef * x ** int(p - order)
    if np.any(x < 0):
        raise DomainError("non-integer p requires H >= c0")
    at_c0 = x == 0
    if order > p and np.any(at_c0):
        raise NonSmoothError(f"derivative of order {order} does not exist at H = c0 for p = {p}")
    with np.errstate(divide="ignore"):
        out = coef * np.where(at_c0, 0.0, x) ** (p - order)
    return np.where(at_c0, 0.0, out)


def eval_density(spec: DensitySpec, H, order: int = 0):
    """Closed-form derivative ``d^order P / dH^order`` at ``H`` (scalar or array)."""
    _check_order(order)
    Ha = np.asarray(H, dtype=float)
    if isinstance(spec, PWillmore):
        out = _pwillmore(spec, Ha, order)
    elif isinstance(spec, ExpSquare):
        with np.errstate(over="ignore"):
            e = np.exp(Ha * Ha)
        poly = (1.0, 2 * Ha, 2 + 4 * Ha**2, 12 * Ha + 8 * Ha**3)[order]
        out = poly * e
    elif isinstance(spec, LogSquare):
        if np.any(np.abs(Ha) < LOG_SQUARE_MIN):
            raise DomainError("log(H^2) requires |H| >= 1e-12")
        out = (np.log(Ha * Ha), 2 / Ha, -2 / Ha**2, 4 / Ha**3)[order]
    elif isinstance(spec, Polynomial):
        c = np.array(spec.coefficients)
        out = npoly.polyval(Ha, npoly.polyder(c, order)) if order < c.size else np.zeros_like(Ha)
    else:
        raise TypeError(f"unknown density {spec!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def eval_curve_density(spec: CurveDensitySpec, kappa, order: int = 0):
    """Closed-form derivative ``d^order Lambda / dkappa^order``."""
    _check_order(order)
    k = np.asarray(kappa, dtype=float)
    if isinstance(spec, Quadratic):
        out = (k * k, 2 * k, 2 + 0 * k, 0 * k)[order]
    elif isinstance(spec, TotalCurvature):
        out = (spec.alpha * k - spec.beta0, spec.alpha + 0 * k, 0 * k, 0 * k)[order]
    elif isinstance(spec, Polynomial):
        c = np.array(spec.coefficients)
        out = npoly.polyval(k, npoly.polyder(c, order)) if order < c.size else np.zeros_like(k)
    else:
        raise TypeError(f"unknown curve density {spec!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EnergyParams:
    eta: float
    varpi: float
    beta: float
    density: DensitySpec
    boundary_density: CurveDensitySpec

    def __post_init__(self):
        for name in ("eta", "varpi", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")


# serialisation -----------------------------------------------------------

def density_to_dict(spec: DensitySpec) -> dict:
    if isinstance(spec, PWillmore):
        return {"family": "p_willmore", "sigma": spec.sigma, "c0": spec.c0, "p": spec.p}
    if isinstance(spec, ExpSquare):
        return {"family": "exp_square"}
    if isinstance(spec, LogSquare):
        return {"family": "log_square"}
    if isinstance(spec, Polynomial):
        return {"family": "polynomial", "coefficients": list(spec.coefficients)}
    raise TypeError(f"unknown density {spec!r}")


def density_from_dict(d: dict) -> DensitySpec:
    fam = d.get("family")
    if fam == "p_willmore":
        return PWillmore(float(d["sigma"]), float(d.get("c0", 0.0)), float(d.get("p", 2.0)))
    if fam == "exp_square":
        return ExpSquare()
    if fam == "log_square":
        return LogSquare()
    if fam == "polynomial":
        return Polynomial(tuple(d["coefficients"]))
    raise DomainError(f"unknown density family {fam!r}")


def curve_density_to_dict(spec: CurveDensitySpec) -> dict:
    if isinstance(spec, Quadratic):
        return {"family": "quadratic"}
    if isinstance(spec, TotalCurvature):
        return {"family": "total_curvature", "alpha": spec.alpha, "beta0": spec.beta0}
    if isinstance(spec, Polynomial):
        return {"family": "polynomial", "coefficients": list(spec.coefficients)}
    raise TypeError(f"unknown curve density {spec!r}")


def curve_density_from_dict(d: dict) -> CurveDensitySpec:
    fam = d.get("family")
    if fam == "quadratic":
        return Quadratic()
    if fam == "total_curvature":
        return TotalCurvature(float(d["alpha"]), float(d.get("beta0", 0.0)))
    if fam == "polynomial":
        return Polynomial(tuple(d["coefficients"]))
    raise DomainError(f"unknown curve density family {fam!r}")


# total energy ------------------------------------------------------------

@dataclass(frozen=True)
class EnergyBreakdown:
    surface_P: float
    surface_K: float
    boundary_Lambda: float
    boundary_tau: float
    boundary_beta: float
    total: float

    def as_dict(self) -> dict:
        return {
            "surface_P": self.surface_P,
            "surface_K": self.surface_K,
            "boundary_Lambda": self.boundary_Lambda,
            "boundary_tau": self.boundary_tau,
            "boundary_beta": self.boundary_beta,
            "total": self.total,
        }


def surface_integral(profile, integrand, tol: float = 1e-9, a: float = 0.0, b: float | None = None) -> float:
    """``int integrand dSigma`` over the revolved profile, ``dSigma = 2 pi r ds``.

    ``integrand`` receives the dict returned by ``profile.evaluate``.
    """
    from .quadrature import integrate

    def f(s):
        v = profile.evaluate(s)
        return 2 * np.pi * v["r"] * integrand(v)

    return integrate(f, profile.breakpoints_between(a, profile.L if b is None else b), tol)


def total_energy(profile, params: EnergyParams, tol: float = 1e-9) -> EnergyBreakdown:
    """Energy of an axisymmetric disk.

    The Gaussian term is integrated as ``K r = phi' sin(phi)``, which stays
    bounded at the axis.
    """
    sP = surface_integral(profile, lambda v: eval_density(params.density, v["H"], 0), tol)

    def kr(s):
        v = profile.evaluate(s)
        return 2 * np.pi * v["dphi"] * np.sin(v["phi"])

    from .quadrature import integrate

    sK = params.eta * integrate(kr, profile.breakpoints_between(0.0, profile.L), tol)
    rL = profile.boundary.r
    length = 2 * np.pi * rL
    kappa = 1.0 / rL
    bL = float(eval_curve_density(params.boundary_density, kappa, 0)) * length
    bT = 0.0  # parallels are planar
    bB = params.beta * length
    return EnergyBreakdown(sP, sK, bL, bT, bB, sP + sK + bL + bT + bB)

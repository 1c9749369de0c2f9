"""Euler-Lagrange residuals, boundary conditions and closed-form classifications."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy_models import (
    CurveDensitySpec,
    DensitySpec,
    EnergyParams,
    PWillmore,
    density_to_dict,
    eval_curve_density,
    eval_density,
    surface_integral,
)
from .errors import BranchError, DifferentiationError, InfeasibleCap, SingularG
from .profile import ORIENTATION_BRANCH, ProfileTrajectory
from .surface_geometry import ParallelData, parallel_data

ANALYTIC_TOL = 1e-10
ODE_TOL = 1e-6


# boundary data ------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryPoint:
    """Frenet data (kappa, tau) and contact angle theta with s-derivatives.

    kappa_n = kappa cos(theta), kappa_g = kappa sin(theta),
    tau_g = theta' - tau.
    """

    kappa: float
    theta: float
    tau: float = 0.0
    dkappa: float = 0.0
    ddkappa: float = 0.0
    dtau: float = 0.0
    dtheta: float = 0.0
    ddtheta: float = 0.0

    @classmethod
    def from_parallel(cls, pd: ParallelData) -> "BoundaryPoint":
        return cls(kappa=pd.kappa, theta=pd.theta)

    @property
    def kn(self) -> float:
        return self.kappa * math.cos(self.theta)

    @property
    def kg(self) -> float:
        return self.kappa * math.sin(self.theta)

    @property
    def tg(self) -> float:
        return self.dtheta - self.tau

    @property
    def dkn(self) -> float:
        return self.dkappa * math.cos(self.theta) - self.kappa * math.sin(self.theta) * self.dtheta

    @property
    def dkg(self) -> float:
        return self.dkappa * math.sin(self.theta) + self.kappa * math.cos(self.theta) * self.dtheta

    @property
    def ddkn(self) -> float:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (self.ddkappa * c - 2 * self.dkappa * s * self.dtheta
                - self.kappa * c * self.dtheta**2 - self.kappa * s * self.ddtheta)

    @property
    def ddkg(self) -> float:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (self.ddkappa * s + 2 * self.dkappa * c * self.dtheta
                - self.kappa * s * self.dtheta**2 + self.kappa * c * self.ddtheta)

    @property
    def dtg(self) -> float:
        return self.ddtheta - self.dtau


def G_jet(bp: BoundaryPoint, Lam: CurveDensitySpec) -> tuple[float, float, float]:
    """G = Lambda'(kappa)/kappa and its first two arclength derivatives."""
    k = bp.kappa
    if not k > 0:
        raise SingularG("G = Lambda'/kappa needs kappa > 0")
    L1, L2, L3 = (eval_curve_density(Lam, k, o) for o in (1, 2, 3))
    g = L1 / k
    g1 = L2 / k - L1 / k**2
    g2 = L3 / k - 2 * L2 / k**2 + 2 * L1 / k**3
    return g, g1 * bp.dkappa, g2 * bp.dkappa**2 + g1 * bp.ddkappa


def _closure_term(bp: BoundaryPoint, Lam: CurveDensitySpec, beta: float) -> float:
    k = bp.kappa
    return k * eval_curve_density(Lam, k, 1) - eval_curve_density(Lam, k, 0) - beta


def j_prime_darboux(bp: BoundaryPoint, Lam: CurveDensitySpec, beta: float, varpi: float) -> tuple[float, float]:
    """(J'.nu, J'.n) from the expansion in Darboux quantities."""
    G, dG, ddG = G_jet(bp, Lam)
    kn, kg, tg = bp.kn, bp.kg, bp.tg
    dkn, dkg, dtg = bp.dkn, bp.dkg, bp.dtg
    c = _closure_term(bp, Lam, beta)
    Gkn2 = ddG * kn + 2 * dG * dkn + G * bp.ddkn
    Gkg2 = ddG * kg + 2 * dG * dkg + G * bp.ddkg
    jnu = (Gkn2 + c * kn + (G * tg + varpi) * (dkg - kn * tg) + 2 * dG * kg * tg
           + G * (dkg * tg + kg * dtg))
    jn = (Gkg2 + c * kg - (G * tg + varpi) * (dkn + kg * tg) - 2 * dG * kn * tg
          - G * (dkn * tg + kn * dtg))
    return jnu, jn


def j_prime_frenet(bp: BoundaryPoint, Lam: CurveDensitySpec, beta: float, varpi: float) -> tuple[float, float]:
    """(J'.nu, J'.n) from the Frenet components of J', rotated by theta.

    J' has no tangential part; its N and B components are
    A_N = (L')'' + kappa^2 L' - kappa (L + beta) - tau^2 L' + varpi kappa tau and
    A_B = 2 tau (L')' + tau' L' - varpi kappa'. With nu = cos(theta) N - sin(theta) B
    and n = sin(theta) N + cos(theta) B.
    """
    k, t = bp.kappa, bp.tau
    L0, L1, L2, L3 = (eval_curve_density(Lam, k, o) for o in range(4))
    dL1 = L2 * bp.dkappa
    ddL1 = L3 * bp.dkappa**2 + L2 * bp.ddkappa
    AN = ddL1 + k * k * L1 - k * (L0 + beta) - t * t * L1 + varpi * k * t
    AB = 2 * t * dL1 + bp.dtau * L1 - varpi * bp.dkappa
    c, s = math.cos(bp.theta), math.sin(bp.theta)
    return AN * c - AB * s, AN * s + AB * c


def boundary_gaussian_curvature(bp: BoundaryPoint, H: float) -> float:
    return bp.kn * (2 * H - bp.kn) - bp.tg**2


def boundary_residuals(bp: BoundaryPoint, params: EnergyParams, H: float, dn_H: float, dn_Pdot: float,
                       K: float | None = None) -> dict:
    """Residuals of the three boundary Euler-Lagrange equations.

    el2 = P' + 2 eta kappa_n, el3 = 2 J'.nu + 2 eta tau_g' - d_n P',
    el4 = J'.n + eta K + P, where P' = dP/dH. ``K`` defaults to the boundary
    identity kappa_n (2H - kappa_n) - tau_g^2. ``dn_H`` is accepted for
    symmetry with the p-Willmore form and is not used here.
    """
    P = eval_density(params.density, H, 0)
    Pd = eval_density(params.density, H, 1)
    jnu, jn = j_prime_darboux(bp, params.boundary_density, params.beta, params.varpi)
    if K is None:
        K = boundary_gaussian_curvature(bp, H)
    return {
        "el2": Pd + 2 * params.eta * bp.kn,
        "el3": 2 * jnu + 2 * params.eta * bp.dtg - dn_Pdot,
        "el4": jn + params.eta * K + P,
    }


def geodesic_bc(kn: float, K: float, kappa: float, H: float, dn_Pdot: float, params: EnergyParams) -> dict:
    """Residuals of the geodesic-boundary conditions for a parallel."""
    P = eval_density(params.density, H, 0)
    Pd = eval_density(params.density, H, 1)
    Lam = params.boundary_density
    c = kappa * eval_curve_density(Lam, kappa, 1) - eval_curve_density(Lam, kappa, 0) - params.beta
    return {
        "bcgeo1": Pd + 2 * params.eta * kn,
        "bcgeo2": 2 * c * kn - dn_Pdot,
        "bcgeo3": P + params.eta * K,
    }


def nongeodesic_bc(kn: float, kappa: float, H: float, dPds: float, params: EnergyParams) -> dict:
    """Residuals of the non-geodesic conditions, plus the separate P'_s target."""
    P = eval_density(params.density, H, 0)
    Pd = eval_density(params.density, H, 1)
    Lam = params.boundary_density
    c = kappa * eval_curve_density(Lam, kappa, 1) - eval_curve_density(Lam, kappa, 0) - params.beta
    return {
        "bcnogeo1": c,
        "bcnogeo2": Pd + 2 * params.eta * kn,
        "bcnogeo3": 2 * P - (2 * H - kn) * Pd,
        "dPdot_ds": dPds,
    }


# interior ---------------------------------------------------------------

@dataclass(frozen=True)
class ResidualSamples:
    s: np.ndarray
    values: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def _gaussian(v: dict) -> np.ndarray:
    r, phi, dphi = v["r"], v["phi"], v["dphi"]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(r > 0, dphi * np.sin(phi) / np.where(r > 0, r, 1.0), np.where(phi == 0, dphi**2, np.nan))
    return K


def interior_residual(profile: ProfileTrajectory, density: DensitySpec, method: str = "analytic",
                      tol: float = 1e-6) -> ResidualSamples:
    """Residual of Laplacian(P') + 2 P'(2H^2 - K) - 4 H P along the profile.

    On a surface of revolution the Laplacian of w(s) is w'' + (cos(phi)/r) w',
    with the limit 2 w''(0) on the axis. ``analytic`` uses the stored H', H''
    and closed-form density derivatives at the samples; ``numeric``
    differentiates P'(H(s)) by central differences of the dense profile at
    step midpoints, with a step-halving consistency check.
    """
    if method == "analytic":
        s = profile.s
        v = {name: getattr(profile, name) for name in ("r", "phi", "H", "dphi", "dH", "ddH")}
        P, Pd, Pdd, Pddd = (eval_density(density, v["H"], o) for o in range(4))
        w1 = Pdd * v["dH"]
        w2 = Pddd * v["dH"] ** 2 + Pdd * v["ddH"]
    elif method == "numeric":
        mids = 0.5 * (profile.s[1:] + profile.s[:-1])
        steps = np.diff(profile.s)
        s = mids
        v = profile.evaluate(s)
        P, Pd = eval_density(density, v["H"], 0), eval_density(density, v["H"], 1)

        def w(x):
            return eval_density(density, profile.evaluate(x)["H"], 1)

        est = []
        for h in (0.2 * steps, 0.1 * steps):
            wp, w0, wm = w(s + h), Pd, w(s - h)
            est.append(((wp - wm) / (2 * h), (wp - 2 * w0 + wm) / h**2))
        (w1a, w2a), (w1, w2) = est
        scale = np.maximum(1.0, np.abs(w2))
        if np.any(np.abs(w2 - w2a) > tol * scale):
            raise DifferentiationError("sample spacing too coarse for the requested tolerance")
    else:
        raise ValueError("method must be 'analytic' or 'numeric'")
    r, phi = v["r"], v["phi"]
    on_axis = ~(r > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lap = np.where(on_axis, 2 * w2, w2 + np.cos(phi) / np.where(on_axis, 1.0, r) * w1)
    K = _gaussian(v)
    res = lap + 2 * Pd * (2 * v["H"] ** 2 - K) - 4 * v["H"] * P
    return ResidualSamples(np.asarray(s), np.asarray(res, dtype=float))


def pwillmore_interior_residual(profile: ProfileTrajectory, c0: float, p: float) -> ResidualSamples:
    """Residual of the p-Willmore form of the interior equation.

    Laplacian(p (H - c0)^(p-1)) + 2 (H - c0)^(p-1) (2(p-1) H^2 - p K + 2 c0 H),
    written out without the generic density routines.
    """
    H, dH, ddH = profile.H, profile.dH, profile.ddH
    x = H - c0

    def pw(e):
        coef_zero = e < 0 and float(p).is_integer()
        return np.zeros_like(x) if coef_zero else x**e

    a1 = p * (p - 1)
    a2 = p * (p - 1) * (p - 2)
    u1 = (a1 * pw(p - 2) if a1 else 0 * x) * dH
    u2 = (a2 * pw(p - 3) if a2 else 0 * x) * dH**2 + (a1 * pw(p - 2) if a1 else 0 * x) * ddH
    v = {"r": profile.r, "phi": profile.phi, "dphi": profile.dphi}
    r = profile.r
    on_axis = ~(r > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lap = np.where(on_axis, 2 * u2, u2 + np.cos(profile.phi) / np.where(on_axis, 1.0, r) * u1)
    K = _gaussian(v)
    res = lap + 2 * pw(p - 1) * (2 * (p - 1) * H**2 - p * K + 2 * c0 * H)
    return ResidualSamples(profile.s.copy(), res)


def pwillmore_boundary_residuals(bp: BoundaryPoint, sigma: float, c0: float, p: float, eta: float,
                                 Lam: CurveDensitySpec, beta: float, varpi: float,
                                 H: float, dn_H: float, K: float | None = None) -> dict:
    """The three p-Willmore boundary equations, evaluated directly."""
    x = H - c0
    jnu, jn = j_prime_darboux(bp, Lam, beta, varpi)
    if K is None:
        K = boundary_gaussian_curvature(bp, H)
    term3 = sigma * p * (p - 1) * x ** (p - 2) * dn_H if p * (p - 1) != 0 else 0.0
    lead2 = sigma * p * x ** (p - 1) if p != 0 else 0.0
    return {
        "elf2": lead2 + 2 * eta * bp.kn,
        "elf3": 2 * jnu - term3 + 2 * eta * bp.dtg,
        "elf4": jn + sigma * x**p + eta * K,
    }


# integral identities ------------------------------------------------------

def rescaling_terms(profile: ProfileTrajectory, params: EnergyParams, tol: float = 1e-9) -> tuple[float, float]:
    """(int (2P - H P') dSigma, boundary integral of kappa L' - L - beta)."""
    dens = params.density
    lhs = surface_integral(profile, lambda v: 2 * eval_density(dens, v["H"], 0) - v["H"] * eval_density(dens, v["H"], 1), tol)
    rL = profile.boundary.r
    kappa = 1.0 / rL
    Lam = params.boundary_density
    c = kappa * eval_curve_density(Lam, kappa, 1) - eval_curve_density(Lam, kappa, 0) - params.beta
    return lhs, 2 * math.pi * rL * c


def rescaling_defect(profile: ProfileTrajectory, params: EnergyParams, tol: float = 1e-9) -> float:
    lhs, rhs = rescaling_terms(profile, params, tol)
    return lhs - rhs


def flux_value(profile: ProfileTrajectory, c0: float, p: float, tol: float = 1e-9) -> float:
    """``int (H - c0)^(p-1) ((2 - p) H - 2 c0) dSigma`` (not weighted by sigma)."""
    return surface_integral(profile, lambda v: (v["H"] - c0) ** (p - 1) * ((2 - p) * v["H"] - 2 * c0), tol)


# closed-form classifications ---------------------------------------------

@dataclass(frozen=True)
class CapCriticality:
    p: float
    sigma: float
    c0: float
    eta: float
    H_o: float
    kappa_o: float
    feasible: bool
    c0_forced: bool
    beta_condition: str = "kappa*dLambda - Lambda - beta = 0 on the boundary circle"
    sign_checks: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "p": self.p, "sigma": self.sigma, "c0": self.c0, "eta": self.eta, "H_o": self.H_o,
            "kappa_o": self.kappa_o, "feasible": self.feasible, "c0_forced": self.c0_forced,
            "beta_condition": self.beta_condition, "sign_checks": dict(self.sign_checks),
        }


def cap_criticality(p: float, kappa_o: float, sigma: float, c0: float, H_o: float | None = None,
                    *, raise_infeasible: bool = True) -> CapCriticality:
    """Parameters for which a spherical cap spanning a circle of curvature kappa_o is critical.

    p = 1: c0 < 0, eta = -sigma/(4 c0), H_o = 2 c0.
    p = 2: c0 forced to 0, eta = -sigma, H_o free (default -kappa_o).
    integer p > 2: c0 > 0, H_o = -2 c0/(p-2) and
    sigma p^p (-c0)^(p-2) + 4 eta (p-2)^(p-2) = 0.
    """
    if not kappa_o > 0:
        raise ValueError("kappa_o must be positive")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    forced = False
    if p <= 0:
        raise BranchError("no cap branch for p <= 0")
    if p == 1:
        if not c0 < 0:
            raise BranchError("p = 1 caps need c0 < 0")
        eta, Ho = -sigma / (4 * c0), 2 * c0
        checks = {"eta_positive": eta > 0, "sigma_plus_4_eta_c0": sigma + 4 * eta * c0}
    elif p == 2:
        forced = c0 != 0
        c0 = 0.0
        eta = -sigma
        Ho = -kappa_o if H_o is None else float(H_o)
        if not Ho < 0:
            raise BranchError("H_o must be negative")
        checks = {"eta_negative": eta < 0, "sigma_plus_eta": sigma + eta}
    elif float(p).is_integer() and p > 2:
        if not c0 > 0:
            raise BranchError("p > 2 caps need c0 > 0")
        q = int(p)
        Ho = -2 * c0 / (q - 2)
        eta = -sigma * q**q * (-c0) ** (q - 2) / (4 * (q - 2) ** (q - 2))
        expected = eta < 0 if q % 2 == 0 else eta > 0
        checks = {
            "eta_sign_ok": bool(expected),
            "relation": sigma * q**q * (-c0) ** (q - 2) + 4 * eta * (q - 2) ** (q - 2),
        }
    else:
        raise BranchError(f"no cap branch for p = {p}")
    feasible = kappa_o >= -Ho * (1 - 1e-14)
    if not feasible and raise_infeasible:
        raise InfeasibleCap(f"circle of curvature {kappa_o} does not lie on a sphere with H = {Ho}")
    return CapCriticality(float(p), sigma, c0, eta, Ho, kappa_o, bool(feasible), forced, sign_checks=checks)


@dataclass(frozen=True)
class CMCBranch:
    branch: str  # "i", "ii" or "not_critical"
    K: float | None = None


def cmc_classify(H_o: float, c0: float, p: float) -> CMCBranch:
    """Which constant-mean-curvature case can be critical.

    H_o != c0 gives an isoparametric surface with
    2(p-1) H_o^2 + 2 c0 H_o - p K = 0; H_o = c0 needs p >= 2.
    """
    if H_o != c0:
        if p == 0:
            return CMCBranch("i", None) if H_o == 0 else CMCBranch("not_critical")
        return CMCBranch("i", (2 * (p - 1) * H_o**2 + 2 * c0 * H_o) / p)
    return CMCBranch("ii") if p >= 2 else CMCBranch("not_critical")


# reports ----------------------------------------------------------------

@dataclass
class CriticalityReport:
    regime: str
    el1_max: float
    el2: float
    el3: float
    el4: float
    rescaling_defect: float
    rescaling_lhs: float
    rescaling_rhs: float
    flux_value: float | None
    params: dict
    bc: dict = field(default_factory=dict)
    tolerance: float = ODE_TOL
    regularity: str = "smooth"
    orientation_branch: str = ORIENTATION_BRANCH
    extra: dict = field(default_factory=dict)

    @property
    def critical(self) -> bool:
        vals = [self.el1_max, self.el2, self.el3, self.el4, *self.bc.values()]
        scale = abs(self.rescaling_lhs) + abs(self.rescaling_rhs) + 1
        return (all(abs(x) < self.tolerance for x in vals)
                and abs(self.rescaling_defect) < self.tolerance * scale)

    def to_json_dict(self) -> dict:
        out = {
            "regime": self.regime,
            "residuals": {"el1_max": self.el1_max, "el2": self.el2, "el3": self.el3, "el4": self.el4},
            "rescaling_defect": self.rescaling_defect,
            "flux_value": self.flux_value,
            "params": dict(self.params),
            "orientation_branch": self.orientation_branch,
            "bc_residuals": dict(self.bc),
            "rescaling": {"lhs": self.rescaling_lhs, "rhs": self.rescaling_rhs},
            "tolerance": self.tolerance,
            "critical": self.critical,
            "regularity": self.regularity,
        }
        if self.extra:
            out["extra"] = dict(self.extra)
        return out


def evaluate_criticality(profile: ProfileTrajectory, params: EnergyParams, regime: str,
                         tol: float = ODE_TOL, quad_tol: float = 1e-9) -> CriticalityReport:
    """Evaluate every residual for an axisymmetric disk.

    The conormal of the boundary parallel is the profile tangent, so
    d_n P' = P''(H) H'(L).
    """
    dens = params.density
    el1 = interior_residual(profile, dens).max_abs
    b = profile.boundary
    pd = parallel_data(b)
    bp = BoundaryPoint.from_parallel(pd)
    H = b.H
    dH = float(profile.dH[-1])
    dn_Pdot = eval_density(dens, H, 2) * dH
    K = float(profile.dphi[-1]) * math.sin(b.phi) / b.r
    res = boundary_residuals(bp, params, H, dH, dn_Pdot, K=K)
    if regime == "geodesic":
        bc = geodesic_bc(pd.kappa_n, K, pd.kappa, H, dn_Pdot, params)
    elif regime == "nongeodesic":
        bc = nongeodesic_bc(pd.kappa_n, pd.kappa, H, dn_Pdot, params)
    else:
        bc = {}
    lhs, rhs = rescaling_terms(profile, params, quad_tol)
    pw = isinstance(dens, PWillmore)
    flux = flux_value(profile, dens.c0, dens.p, quad_tol) if pw else None
    prm = {
        "eta": params.eta, "beta": params.beta, "varpi": params.varpi,
        "sigma": dens.sigma if pw else None, "c0": dens.c0 if pw else None, "p": dens.p if pw else None,
    }
    extra = {"density": density_to_dict(dens), "boundary_K_identity": K - boundary_gaussian_curvature(bp, H)}
    return CriticalityReport(regime, el1, res["el2"], res["el3"], res["el4"], lhs - rhs, lhs, rhs, flux, prm,
                             bc, tol, extra=extra)

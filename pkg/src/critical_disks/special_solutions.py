"""Closed-form critical families: spherical caps, p = 1 Weingarten disks, p = 0 and p = 1 boundary data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .curve_geometry import Curve, solve_circle_curvature
from .el_residuals import (
    ANALYTIC_TOL,
    BoundaryPoint,
    CapCriticality,
    CriticalityReport,
    cap_criticality,
    evaluate_criticality,
    j_prime_frenet,
    pwillmore_boundary_residuals,
    pwillmore_interior_residual,
)
from .energy_models import CurveDensitySpec, EnergyParams, PWillmore, TotalCurvature, eval_curve_density
from .errors import AxisSingularity, BranchStall, InfeasibleCap, NoRoot
from .profile import ProfileTrajectory
from .quadrature import integrate
from .rk import dopri5
from .surface_geometry import ParallelData, gauss_bonnet_defect, parallel_data, sphere_cap_profile


# spherical caps ---------------------------------------------------------------

@dataclass(frozen=True)
class CapSpec:
    H_o: float
    kappa_o: float
    p: float
    sigma: float
    c0: float
    eta: float
    beta: float
    classification: CapCriticality


@dataclass
class CapResult:
    spec: CapSpec
    profile: ProfileTrajectory
    report: CriticalityReport


def build_cap(p: float, sigma: float, c0: float, Lam: CurveDensitySpec, beta: float, *,
              H_o: float | None = None, kappa_o: float | None = None, larger: bool = False,
              z0: float = 1.0) -> CapResult:
    """Spherical cap critical for the p-Willmore energy with an elastic boundary circle.

    The boundary curvature kappa_o solves kappa L' - L - beta = 0 (smallest
    feasible root unless given). The cap is the part of the sphere of mean
    curvature H_o = -1/R cut at the parallel of radius 1/kappa_o; ``larger``
    selects the cap containing the equator.
    """
    if kappa_o is None:
        if isinstance(Lam, TotalCurvature):
            raise NoRoot("every circle satisfies the closure condition; pass kappa_o")
        roots = solve_circle_curvature(Lam, beta)
        probe = cap_criticality(p, roots[-1], sigma, c0, H_o, raise_infeasible=False)
        feasible = [k for k in roots if k >= -probe.H_o * (1 - 1e-14)]
        if not feasible:
            raise InfeasibleCap(f"no closure root kappa >= {-probe.H_o}")
        kappa_o = feasible[0]
    cls = cap_criticality(p, kappa_o, sigma, c0, H_o)
    Ho = cls.H_o
    sin_a = min(1.0, -Ho / kappa_o)
    alpha = math.asin(sin_a)
    if larger:
        alpha = math.pi - alpha
    L = alpha / -Ho
    profile = sphere_cap_profile(Ho, L, z0)
    density = PWillmore(sigma, cls.c0, p)
    params = EnergyParams(eta=cls.eta, varpi=0.0, beta=beta, density=density, boundary_density=Lam)
    report = evaluate_criticality(profile, params, "cap", tol=ANALYTIC_TOL)
    b = profile.boundary
    pd = parallel_data(b)
    bp = BoundaryPoint.from_parallel(pd)
    K = float(profile.dphi[-1]) * pd.kappa_n
    elf = pwillmore_boundary_residuals(bp, sigma, cls.c0, p, cls.eta, Lam, beta, 0.0, b.H, 0.0, K=K)
    report.extra["elf1_max"] = pwillmore_interior_residual(profile, cls.c0, p).max_abs
    report.extra.update(elf)
    report.extra["gauss_bonnet_defect"] = gauss_bonnet_defect(profile)
    report.extra["cap"] = cls.as_dict()
    spec = CapSpec(Ho, kappa_o, p, sigma, cls.c0, cls.eta, beta, cls)
    return CapResult(spec, profile, report)


# p = 1 linear Weingarten disks ---------------------------------------------------

@dataclass(frozen=True)
class WeingartenSpec:
    c0: float
    d: float
    eps: int = -1

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        if self.eps != -1:
            raise ValueError("only the eps = -1 branch is implemented")
        if self.d < self.c0**2:
            raise ValueError("d must be at least c0^2")


def weingarten_kn(chi, c0: float):
    """kappa_n = -c0 chi / (chi + c0) in the sign convention of the parameterisation."""
    chi = np.asarray(chi, dtype=float)
    if np.any(chi + c0 == 0):
        raise AxisSingularity("kappa_n is singular at chi = -c0")
    out = -c0 * chi / (chi + c0)
    return float(out) if out.ndim == 0 else out


def _wg_terms(chi, c, d):
    A = -chi * (chi + 2 * c)
    B = -chi * ((d + c * c) * chi + 2 * c * d)
    return A, B


def chi_prime(chi, c: float, d: float):
    """chi' on the eps = -1 branch: (A/c^2) sqrt(B) with A = -chi(chi+2c), B = -chi((d+c^2)chi + 2cd)."""
    A, B = _wg_terms(chi, c, d)
    return A * np.sqrt(B) / c**2


def _tangent_angle(chi, c, d):
    """phi(chi) = arctan(z_chi / r_chi); accepts complex chi for complex-step derivatives."""
    _, B = _wg_terms(chi, c, d)
    return np.arctan(c * chi / np.sqrt(B))


@dataclass
class WeingartenSurface:
    spec: WeingartenSpec
    profile: ProfileTrajectory
    chi: np.ndarray
    K_minus_2cH: np.ndarray  # at samples with r > 0
    boundary_chi: float
    boundary_kn: float  # closed form at the boundary
    boundary_kn_geometric: float  # sin(phi)/r in the package orientation
    z_quadrature_gap: float
    report: dict


def weingarten_profile(spec: WeingartenSpec, n: int = 400, z0: float = 1.0, tol: float = 1e-13) -> WeingartenSurface:
    """Profile of the p = 1 critical disk from the chi first integral.

    chi runs monotonically from -c0 (axis) to -2c0/3 (boundary) because
    chi' > 0 on that interval when d > c0^2, so no turning points occur.
    (chi, z) is integrated in the arclength s with z' = sin(phi); r is the
    closed form (chi + c0)/(sqrt(d) sqrt(A)). z is also recomputed by
    Gauss-Legendre quadrature in chi as a consistency check. Curvatures are
    computed from the geometry (complex-step derivative of the tangent
    angle), not from chi, so K - 2 c0 H is a genuine test.
    """
    if n < 100:
        raise ValueError("n must be at least 100")
    c, d = spec.c0, spec.d
    if d - c * c <= 1e-12 * c * c:
        raise BranchStall("chi' vanishes identically when d = c0^2")
    chi_end = -2 * c / 3
    sd = math.sqrt(d)

    def sin_phi(chi):
        A, _ = _wg_terms(chi, c, d)
        return c * chi / np.sqrt(d * A)

    def rhs(_s, y):
        chi = min(y[0], -1e-300)
        return np.array([chi_prime(chi, c, d), sin_phi(chi)])

    def on_step(seg, y):
        return "end" if y[0] >= chi_end else None

    L_guess = integrate(lambda x: c * c / (-(x * (x + 2 * c))) / np.sqrt(_wg_terms(x, c, d)[1]),
                        np.linspace(-c, chi_end, 17), 1e-12)
    res = dopri5(rhs, 0.0, np.array([-c, z0]), 2 * L_guess, rtol=tol, atol=tol, max_step=L_guess / 50,
                 on_step=on_step)
    seg = next(sg for sg in res.segments if sg(np.array([sg.t1]))[0, 0] >= chi_end)
    L = brentq(lambda t: seg(np.array([t]))[0, 0] - chi_end, seg.t0, seg.t1, xtol=1e-15, rtol=1e-15)

    def dense(s):
        s = np.asarray(s, dtype=float)
        y = res.dense(s)
        chi = np.clip(y[:, 0], -c, chi_end)
        A, B = _wg_terms(chi, c, d)
        r = (chi + c) / (sd * np.sqrt(A))
        phi = _tangent_angle(chi, c, d)
        h = 1e-30
        dphi_dchi = np.imag(_tangent_angle(chi + 1j * h, c, d)) / h
        cp = chi_prime(chi, c, d)
        k_m = dphi_dchi * cp
        with np.errstate(divide="ignore", invalid="ignore"):
            k_p = np.where(r > 0, np.sin(phi) / r, -np.inf)
            H = 0.5 * (k_m + k_p)
            dH = A / (2 * (chi + c) ** 2) * cp  # from H = -chi^2 / (2 (chi + c))
        return {"r": r, "z": y[:, 1], "phi": phi, "H": H, "dphi": k_m, "dH": dH,
                "ddH": np.full_like(s, np.nan), "chi": chi, "k_parallel": k_p}

    s = np.linspace(0.0, L, n)
    v = dense(s)
    v["r"][0] = 0.0
    v["chi"][0] = -c
    samples = {"s": s, **{k: v[k] for k in ("r", "z", "phi", "H", "dphi", "dH", "ddH", "chi")}}
    profile = ProfileTrajectory(samples, dense, breakpoints=np.union1d(s, res.t[res.t < L]),
                                meta={"kind": "weingarten", "c0": c, "d": d, "regularity": "C0_at_axis"})
    off_axis = v["r"] > 0
    K = v["dphi"][off_axis] * v["k_parallel"][off_axis]
    gap = K - 2 * c * v["H"][off_axis]

    # z by Gauss-Legendre in chi: dz/dchi = c^3 chi / (sqrt(d) A^(3/2) sqrt(B))
    def dz_dchi(x):
        A, B = _wg_terms(x, c, d)
        return c**3 * x / (sd * A**1.5 * np.sqrt(B))

    z_quad = z0 + integrate(dz_dchi, np.linspace(-c, chi_end, 33), 1e-13)
    chi_L = float(res.dense(np.array([L]))[0, 0])
    b = profile.boundary
    kn_geo = math.sin(b.phi) / b.r
    report = {
        "regularity": "C0_at_axis",
        "c0": c,
        "d": d,
        "L": L,
        "chi_range": [float(v["chi"].min()), float(v["chi"].max())],
        "max_abs_K_minus_2c0H": float(np.max(np.abs(gap))),
        "boundary_chi": chi_L,
        "boundary_kn_closed_form": weingarten_kn(chi_L, c),
        "boundary_kn_geometric": kn_geo,
        "boundary_H": b.H,
        "axis_tangent_angle": float(v["phi"][0]),
        "gauss_bonnet_defect": gauss_bonnet_defect(profile),
        "z_quadrature_gap": abs(z_quad - b.z),
    }
    return WeingartenSurface(spec, profile, v["chi"], gap, chi_L, weingarten_kn(chi_L, c), kn_geo,
                             abs(z_quad - b.z), report)


# p = 0 and p = 1 boundary conditions -----------------------------------------------

def p0_minimal_boundary_conditions(bp: BoundaryPoint, Lam: CurveDensitySpec, varpi: float, beta: float,
                                   sigma: float, eta: float, planar: bool | None = None) -> dict:
    """Boundary residuals for the area functional with an elastic boundary.

    el02 = eta kappa_n, el03 = J'.nu + eta tau_g', el04 = J'.n - eta tau_g^2 + sigma,
    with J' taken from its Frenet components. For a planar boundary
    (tau = 0, theta = +-pi/2) the planar equation
    (L')'' + kappa^2 L' - kappa (L + beta) + sign sigma is added, where
    sign = sin(theta) is the sign of kappa_g / kappa.
    """
    jnu, jn = j_prime_frenet(bp, Lam, beta, varpi)
    out = {
        "el02": eta * bp.kn,
        "el03": jnu + eta * bp.dtg,
        "el04": jn - eta * bp.tg**2 + sigma,
    }
    if planar is None:
        planar = bp.tau == 0 and bp.dtau == 0 and abs(math.cos(bp.theta)) < 1e-12 and bp.dtheta == 0
    if planar:
        k = bp.kappa
        L0, L1, L2, L3 = (eval_curve_density(Lam, k, o) for o in range(4))
        ddL1 = L3 * bp.dkappa**2 + L2 * bp.ddkappa
        sign = math.copysign(1.0, math.sin(bp.theta))
        out["areacons"] = ddL1 + k * k * L1 - k * (L0 + beta) + sign * sigma
        out["areacons_sign"] = sign
    return out


def conormal_closure(curve: Curve, nu) -> float:
    """|int n ds| with n = T x nu along a closed curve; ``nu`` is a constant vector or callable of s."""
    def n_at(s):
        fr = curve.frame_at(s)
        T = fr[:, 3:6]
        N = np.broadcast_to(np.asarray(nu(s) if callable(nu) else nu, dtype=float), T.shape)
        return np.cross(T, N)

    comps = [integrate(lambda s, j=j: n_at(s)[:, j], curve.s, 1e-12) for j in range(3)]
    return float(np.linalg.norm(comps))


def p1_axisym_conditions(pd: ParallelData, sigma: float, eta: float, c0: float, Lam: CurveDensitySpec,
                         beta: float, H: float | None = None, K: float | None = None) -> dict:
    """Residuals of the axisymmetric p = 1 boundary conditions.

    sigma + 4 eta c0, kappa_n - 2 c0, kappa L' - L - beta, and, when H and K
    are supplied, K - 2 c0 H at the boundary.
    """
    k = pd.kappa
    out = {
        "sigma_plus_4_eta_c0": sigma + 4 * eta * c0,
        "kn_minus_2c0": pd.kappa_n - 2 * c0,
        "closure": k * eval_curve_density(Lam, k, 1) - eval_curve_density(Lam, k, 0) - beta,
    }
    if H is not None and K is not None:
        out["K_minus_2c0H"] = K - 2 * c0 * H
    return out

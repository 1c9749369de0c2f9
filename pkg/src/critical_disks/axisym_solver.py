"""Axisymmetric profile integration and shooting on the boundary conditions.

Profile variables follow the orientation in :mod:`critical_disks.profile`.
Writing P, P', P'' for derivatives of the density in H, the first integral
of the interior equation reads

    P sin(phi) - 1/2 P' phi' sin(phi) - 1/2 (P')_s cos(phi) = 0,      (*)

with phi' = 2H - sin(phi)/r. Solving (*) for H' is singular where the
tangent is vertical. We integrate instead the regular system in
(r, z, phi, H, Q) with

    H' = Q sin(phi) / P'',   Q' = P' (phi' r - sin(phi)) / r^2,

where Q is defined by Q cos(phi) = 2P - P' phi'. Differentiating that
definition along solutions shows that I = Q cos(phi) - (2P - P' phi') is
conserved, and the left side of (*) equals -1/2 sin(phi) I, so (*) is the
drift monitor. Integrating Q' also gives r^2 Q = 2 int_0^s (2P - H P') r ds,
which ties Q to the rescaling identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .el_residuals import CriticalityReport, evaluate_criticality
from .energy_models import (
    CurveDensitySpec,
    DensitySpec,
    EnergyParams,
    ExpSquare,
    LogSquare,
    Polynomial,
    PWillmore,
    eval_curve_density,
    eval_density,
)
from .errors import (
    AxisError,
    BlowUp,
    CollapseToAxis,
    ConservationFailure,
    DegenerateDensity,
    NearSpontaneous,
    NoConvergence,
    RegimeViolation,
    SingularBC,
    VerticalTangent,
)
from .profile import Event, ProfileState, ProfileTrajectory
from .rk import Segment, dopri5

VERTICAL_THRESHOLD = 1e-8
DEFAULT_H = 1e-4


# densities as fast scalar closures ----------------------------------------

def scalar_derivatives(density: DensitySpec) -> Callable[[float], tuple[float, float, float, float]]:
    """Return H -> (P, P', P'', P''') using plain floats (hot loop helper)."""
    if isinstance(density, PWillmore) and float(density.p).is_integer():
        sig, c, p = density.sigma, density.c0, int(density.p)

        def f(H):
            x = H - c
            vals = []
            for k in range(4):
                if k > p:
                    vals.append(0.0)
                else:
                    coef = 1.0
                    for j in range(k):
                        coef *= p - j
                    vals.append(sig * coef * x ** (p - k))
            return vals[0], vals[1], vals[2], vals[3]

        return f
    if isinstance(density, ExpSquare):
        def f(H):
            try:
                e = math.exp(H * H)
            except OverflowError:
                e = math.inf
            return e, 2 * H * e, (2 + 4 * H * H) * e, (12 * H + 8 * H**3) * e

        return f
    if isinstance(density, LogSquare):
        def f(H):
            if abs(H) < 1e-12:
                return math.nan, math.nan, math.nan, math.nan
            return math.log(H * H), 2 / H, -2 / (H * H), 4 / H**3

        return f
    if isinstance(density, Polynomial):
        c = np.array(density.coefficients)
        ders = [np.polynomial.polynomial.polyder(c, k) if k < c.size else np.zeros(1) for k in range(4)]
        lists = [list(map(float, d[::-1])) for d in ders]

        def f(H):
            out = []
            for d in lists:
                acc = 0.0
                for a in d:
                    acc = acc * H + a
                out.append(acc)
            return out[0], out[1], out[2], out[3]

        return f

    def f(H):
        return tuple(float(eval_density(density, H, k)) for k in range(4))

    return f


# reduced system and diagnostics -------------------------------------------

def ode_rhs(state: ProfileState, density: DensitySpec) -> dict:
    """Right-hand side of the reduced profile system in (r, z, phi, H)."""
    if not state.r > 0:
        raise AxisError("ode_rhs needs r > 0; start from series_start")
    P, Pd, Pdd = (float(eval_density(density, state.H, k)) for k in range(3))
    if Pdd == 0:
        raise DegenerateDensity("P''(H) = 0; use the special-solution routines")
    c, s = math.cos(state.phi), math.sin(state.phi)
    if abs(c) < VERTICAL_THRESHOLD:
        raise VerticalTangent(f"vertical tangent at s = {state.s}")
    dphi = 2 * state.H - s / state.r
    dH = (2 * P * s - Pd * dphi * s) / (Pdd * c)
    return {"r": c, "z": s, "phi": dphi, "H": dH}


def first_integral_residual(state: ProfileState, dphi: float, dH: float, density: DensitySpec) -> float:
    """Left side of the first integral: P sin(phi) - P' phi' sin(phi)/2 - P'' H' cos(phi)/2."""
    P, Pd, Pdd = (float(eval_density(density, state.H, k)) for k in range(3))
    s, c = math.sin(state.phi), math.cos(state.phi)
    return P * s - 0.5 * Pd * dphi * s - 0.5 * Pdd * dH * c


@dataclass(frozen=True)
class AxisSeries:
    phi0: float
    z0: float
    Hpp: float  # H''(0)
    Q0: float

    def __call__(self, s):
        """Third-order Taylor data on [0, h]."""
        a, c = self.phi0, self.Hpp / 4
        s = np.asarray(s, dtype=float)
        return {
            "r": s - a * a * s**3 / 6,
            "z": self.z0 + a * s**2 / 2 + (c - a**3 / 6) * s**4 / 4,
            "phi": a * s + c * s**3,
            "H": a + 2 * c * s**2,
            "dphi": a + 3 * c * s**2,
            "dH": 4 * c * s,
            "ddH": np.full_like(s, 4 * c),
        }


def axis_series(phi0: float, z0: float, density: DensitySpec) -> AxisSeries:
    """Taylor germ at the axis.

    Near s = 0, phi = a s + c s^3 with a = phi'(0), so H = a + 2c s^2 and
    sin(phi)/r = a + (c + a^3/6) s^2 + O(s^4). Expanding the first integral
    to order s^3 gives 4c P''(a) = a (2P(a) - a P'(a)), i.e.
    H''(0) = 4c = a (2P - a P')/P'' at H = a.
    """
    d = scalar_derivatives(density)
    P, Pd, Pdd, _ = d(phi0)
    if Pdd == 0 or not math.isfinite(Pdd):
        raise DegenerateDensity("P''(phi'(0)) must be finite and nonzero")
    Q0 = 2 * P - phi0 * Pd
    return AxisSeries(float(phi0), float(z0), phi0 * Q0 / Pdd, Q0)


def series_start(phi0: float, z0: float, h: float, density: DensitySpec) -> ProfileState:
    """Profile state at s = h from the axis germ (errors O(h^4) in H, O(h^5) in phi)."""
    v = axis_series(phi0, z0, density)(h)
    return ProfileState(float(h), float(v["r"]), float(v["z"]), float(v["phi"]), float(v["H"]))


# integration ------------------------------------------------------------

@dataclass(frozen=True)
class StopSpec:
    """When to stop integrating.

    ``event`` may be ``"vertical"`` (cos(phi) = 0) or ``"flux"`` (Q = 0,
    where P'_s and 2P - phi' P' vanish together); integration ends at the
    ``event_count``-th occurrence. With ``strict`` the collapse and blow-up
    stops raise instead of returning a truncated trajectory.
    """

    max_length: float = 10.0
    r_min: float = 1e-6
    h_max: float = 1e3
    event: str | None = None
    event_count: int = 1
    strict: bool = True


def _rhs_factory(d):
    def rhs(_s, y):
        r, _z, phi, H, Q = y
        sp, cp = math.sin(phi), math.cos(phi)
        P, Pd, Pdd, _ = d(H)
        dphi = 2 * H - sp / r
        return np.array([cp, sp, dphi, Q * sp / Pdd, 2 * Pd * (H * r - sp) / (r * r)])

    return rhs


def _derived(y: np.ndarray, d) -> dict:
    """phi', H', H'', P-scale and drift at state rows y (n, 5)."""
    r, phi, H, Q = y[:, 0], y[:, 2], y[:, 3], y[:, 4]
    vals = np.array([d(h) for h in H]).reshape(-1, 4)
    P, Pd, Pdd, Pddd = vals.T
    sp, cp = np.sin(phi), np.cos(phi)
    dphi = 2 * H - sp / r
    dH = Q * sp / Pdd
    dQ = 2 * Pd * (H * r - sp) / (r * r)
    ddH = (dQ * sp + Q * cp * dphi - Pddd * dH**2) / Pdd
    drift = P * sp - 0.5 * Pd * dphi * sp - 0.5 * Pdd * dH * cp
    scale = np.maximum(1.0, np.abs(P) + np.abs(Pd))
    return {"dphi": dphi, "dH": dH, "ddH": ddH, "drift": drift, "scale": scale}


def _locate(seg: Segment, g, g0: float, g1: float) -> float:
    if g0 == 0:
        return seg.t0
    if g1 == 0:
        return seg.t1
    return brentq(lambda t: g(seg(np.array([t]))[:, 0]), seg.t0, seg.t1, xtol=1e-15, rtol=1e-15)


class _DenseProfile:
    """Dense evaluator: axis series on [0, h), Runge-Kutta interpolant beyond (picklable)."""

    def __init__(self, res, germ: AxisSeries, density, h: float):
        self.res, self.germ, self.density, self.h = res, germ, density, h
        self._d = None

    def __getstate__(self):
        return {k: v for k, v in self.__dict__.items() if k != "_d"} | {"_d": None}

    def __call__(self, s):
        if self._d is None:
            self._d = scalar_derivatives(self.density)
        germ, d = self.germ, self._d
        s = np.asarray(s, dtype=float)
        out = {k: np.empty_like(s) for k in ("r", "z", "phi", "H", "dphi", "dH", "ddH", "Q")}
        near = s < self.h
        if near.any():
            g = germ(s[near])
            for k in g:
                out[k][near] = g[k]
            out["Q"][near] = germ.Q0 + float(d(germ.phi0)[1]) * germ.Hpp * s[near] ** 2 / 4
        far = ~near
        if far.any():
            yy = self.res.dense(s[far])
            dd = _derived(yy, d)
            for j, k in enumerate(("r", "z", "phi", "H", "Q")):
                out[k][far] = yy[:, j]
            for k in ("dphi", "dH", "ddH"):
                out[k][far] = dd[k]
        return out


def integrate_profile(
    phi0: float,
    density: DensitySpec,
    stop: StopSpec = StopSpec(),
    *,
    z0: float = 1.0,
    h: float = DEFAULT_H,
    tol: float = 1e-10,
    drift_tol: float | None = None,
) -> ProfileTrajectory:
    """Integrate the profile from the axis with phi'(0) = ``phi0``.

    Steps are rejected when the first-integral drift exceeds ``drift_tol``
    times the running maximum of ``max(1, |P| + |P'|)`` along the
    trajectory (the drift is accumulated, so it is measured against the
    largest density scale seen so far); if that cannot be met the run raises
    :class:`ConservationFailure`. ``drift_tol`` defaults to
    ``max(1e-9, 100 tol)`` since the drift cannot fall far below the local
    error control. Vertical tangents, zeros of Q and crossings of H = c0 are
    logged as events.
    """
    if drift_tol is None:
        drift_tol = max(1e-9, 100 * tol)
    d = scalar_derivatives(density)
    germ = axis_series(phi0, z0, density)
    if phi0 == 0.0:
        germ = AxisSeries(0.0, float(z0), 0.0, germ.Q0)
    v0 = germ(np.array([h]))
    r0, z_0, p0, H0 = (float(v0[k][0]) for k in ("r", "z", "phi", "H"))
    P, Pd, _, _ = d(H0)
    Q_start = (2 * P - Pd * (2 * H0 - math.sin(p0) / r0)) / math.cos(p0)
    y0 = np.array([r0, z_0, p0, H0, Q_start])
    rhs = _rhs_factory(d)
    c0 = density.c0 if isinstance(density, PWillmore) else None
    events: list[Event] = []
    counts = {"vertical": 0, "flux": 0}
    state = {"stop_at": None, "reason": None, "scale": max(1.0, abs(P) + abs(Pd))}

    def accept(_t, y):
        r, _z, phi, H, Q = y
        P, Pd, Pdd, _ = d(H)
        if not (math.isfinite(P) and math.isfinite(Pd) and math.isfinite(Pdd)):
            return True  # handled as blow-up by on_step
        sp, cp = math.sin(phi), math.cos(phi)
        dphi = 2 * H - sp / r
        res = P * sp - 0.5 * Pd * dphi * sp - 0.5 * Q * sp * cp
        return abs(res) <= drift_tol * max(state["scale"], abs(P) + abs(Pd))

    def on_step(seg: Segment, y):
        ya = seg.y0
        if not np.all(np.isfinite(y)):
            state["reason"] = "blowup"
            return "blowup"
        # logged events
        checks = [("vertical", lambda yy: np.cos(yy[2]), math.cos(ya[2]), math.cos(y[2])),
                  ("flux", lambda yy: yy[4], ya[4], y[4])]
        if c0 is not None:
            checks.append(("H_equals_c0", lambda yy: yy[3] - c0, ya[3] - c0, y[3] - c0))
        if isinstance(density, LogSquare):
            checks.append(("H_zero", lambda yy: yy[3], ya[3], y[3]))
        for kind, g, g0, g1 in checks:
            if g0 * g1 < 0 or (g1 == 0 and g0 != 0):
                s_e = _locate(seg, g, g0, g1)
                ye = seg(np.array([s_e]))[:, 0]
                detail = {}
                if kind == "vertical":
                    P, Pd, _, _ = d(ye[3])
                    dphi = 2 * ye[3] - math.sin(ye[2]) / ye[0]
                    constraint = (2 * P - Pd * dphi) * math.sin(ye[2])
                    scale = max(state["scale"], abs(P) + abs(Pd))
                    detail = {"constraint": constraint, "dH": ye[4] * math.sin(ye[2]) / d(ye[3])[2]}
                    if abs(constraint) > 1e-8 * scale:
                        raise ConservationFailure(f"first-integral constraint {constraint:.3e} at vertical tangent s={s_e}")
                events.append(Event("vertical_tangent" if kind == "vertical" else
                                    "flux_zero" if kind == "flux" else kind, float(s_e), detail))
                if kind == "H_zero":
                    state["stop_at"], state["reason"] = float(s_e), "domain"
                    return "domain"
                if kind in counts:
                    counts[kind] += 1
                    if stop.event == kind and counts[kind] == stop.event_count:
                        state["stop_at"], state["reason"] = float(s_e), "event"
                        return "event"
        if abs(y[3]) > stop.h_max:
            state["reason"] = "blowup"
            return "blowup"
        P, Pd, _, _ = d(y[3])
        state["scale"] = max(state["scale"], abs(P) + abs(Pd))
        if y[0] < stop.r_min:
            state["reason"] = "collapse"
            return "collapse"
        return None

    res = dopri5(rhs, h, y0, stop.max_length, rtol=tol, atol=tol, max_step=0.05, accept=accept,
                 on_step=on_step, h_min=1e-13)
    if res.status == "veto":
        raise ConservationFailure(res.message)
    status = res.status
    if status in ("h_min", "max_steps"):
        status = "blowup"
    if status == "blowup" and stop.strict:
        raise BlowUp(f"curvature blow-up near s = {res.t[-1]:.6g}")
    if status == "collapse" and stop.strict:
        raise CollapseToAxis(f"profile returned to the axis near s = {res.t[-1]:.6g}")

    ys = res.y
    der = _derived(ys, d)
    s_nodes = np.concatenate([[0.0], res.t])
    samples = {
        "s": s_nodes,
        "r": np.concatenate([[0.0], ys[:, 0]]),
        "z": np.concatenate([[float(z0)], ys[:, 1]]),
        "phi": np.concatenate([[0.0], ys[:, 2]]),
        "H": np.concatenate([[float(phi0)], ys[:, 3]]),
        "dphi": np.concatenate([[float(phi0)], der["dphi"]]),
        "dH": np.concatenate([[0.0], der["dH"]]),
        "ddH": np.concatenate([[germ.Hpp], der["ddH"]]),
        "Q": np.concatenate([[germ.Q0], ys[:, 4]]),
    }
    drift = np.concatenate([[0.0], der["drift"]])

    dense = _DenseProfile(res, germ, density, h)

    meta = {"phi0": float(phi0), "z0": float(z0), "density": density, "h": h, "tol": tol,
            "drift_tol": drift_tol, "n_rejected": res.n_rejected, "H_sign": float(np.sign(phi0))}
    traj = ProfileTrajectory(samples, dense, breakpoints=s_nodes, drift=drift, events=events,
                             status=state["reason"] or status, meta=meta)
    if state["stop_at"] is not None:
        traj = traj.truncated(state["stop_at"])
    return traj


def drift_scale(traj: ProfileTrajectory) -> np.ndarray:
    """Running maximum of max(1, |P| + |P'|) along the samples."""
    d = scalar_derivatives(traj.meta["density"])
    pointwise = np.array([max(1.0, abs(v[0]) + abs(v[1])) for v in map(d, traj.H)])
    return np.maximum.accumulate(pointwise)


def drift_ok(traj: ProfileTrajectory, drift_tol: float = 1e-9) -> bool:
    """Check the conservation bound at every stored sample."""
    return bool(np.all(np.abs(traj.drift) <= drift_tol * drift_scale(traj)))


def sweep_phi0(density: DensitySpec, grid, stop: StopSpec, *, tol: float = 1e-10, drift_tol: float = 1e-9,
               jobs: int = 1) -> list[ProfileTrajectory]:
    """Integrate one trajectory per phi'(0) in ``grid``; results keep grid order."""
    args = [(float(a), density, stop, tol, drift_tol) for a in grid]
    if jobs <= 1:
        return [_sweep_one(a) for a in args]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_sweep_one, args))


def _sweep_one(args):
    a, density, stop, tol, drift_tol = args
    return integrate_profile(a, density, stop, tol=tol, drift_tol=drift_tol)


# Helfrich integrated relation -------------------------------------------------

def helfrich_first_integral(traj: ProfileTrajectory, sigma: float, c0: float) -> dict:
    """q = z + nu_3/(H - c0) with nu_3 = cos(phi); constant on Helfrich solutions."""
    gap = traj.H - c0
    if np.any(np.abs(gap) < 1e-8):
        raise NearSpontaneous("H comes within 1e-8 of c0")
    q = traj.z + np.cos(traj.phi) / gap
    mean = float(np.mean(q))
    return {"z0_fit": mean, "max_deviation": float(np.max(np.abs(q - mean))), "std": float(np.std(q))}


# shooting -------------------------------------------------------------------

@dataclass
class ShootingResult:
    phi0: float
    L: float
    eta: float
    beta: float
    residuals: dict
    regime: str
    trace: list = field(default_factory=list)
    report: CriticalityReport | None = None
    profile: ProfileTrajectory | None = None

    def as_dict(self) -> dict:
        return {
            "phi0": self.phi0, "L": self.L, "eta": self.eta, "beta": self.beta,
            "residuals": dict(self.residuals), "regime": self.regime, "trace": list(self.trace),
        }


def _boundary_values(v: dict, d) -> dict:
    r, phi, H, dH, dphi = (float(v[k][0]) for k in ("r", "phi", "H", "dH", "dphi"))
    P, Pd, Pdd, _ = d(H)
    kn = math.sin(phi) / r
    kg = -math.cos(phi) / r
    K = dphi * kn
    return {"r": r, "phi": phi, "H": H, "P": P, "Pd": Pd, "Pdd": Pdd, "dPds": Pdd * dH,
            "kn": kn, "kg": kg, "K": K, "scale": max(1.0, abs(P) + abs(Pd))}


def _targets(regime: str, b: dict) -> np.ndarray:
    if regime == "geodesic":
        eta = -b["Pd"] / (2 * b["kn"]) if b["kn"] != 0 else math.inf
        return np.array([b["kg"], b["P"] + eta * b["K"]])
    return np.array([b["dPds"], 2 * b["P"] - (2 * b["H"] - b["kn"]) * b["Pd"]])


class _Shooter:
    def __init__(self, density, regime, tol, drift_tol, L_max):
        self.density, self.regime = density, regime
        self.tol, self.drift_tol, self.L_max = tol, drift_tol, L_max
        self.d = scalar_derivatives(density)
        self.cache: dict[float, ProfileTrajectory] = {}

    def traj(self, a: float) -> ProfileTrajectory:
        if a not in self.cache:
            stop = StopSpec(max_length=self.L_max, strict=False)
            self.cache[a] = integrate_profile(a, self.density, stop, tol=self.tol, drift_tol=self.drift_tol)
        return self.cache[a]

    def F(self, a: float, L: float) -> tuple[np.ndarray, dict]:
        t = self.traj(a)
        if not (0 < L <= t.L):
            raise ValueError("length outside the integrated range")
        b = _boundary_values(t.evaluate(L), self.d)
        return _targets(self.regime, b), b


def _scan_first_target(sh: _Shooter, a: float, L_guess: float) -> float:
    t = sh.traj(a)
    v = t.evaluate(t.s[1:])
    vals = np.array([_targets(sh.regime, _boundary_values({k: np.atleast_1d(v[k][i]) for k in v}, sh.d))
                     for i in range(t.s.size - 1)])
    f1 = vals[:, 0]
    cands = []
    for i in np.flatnonzero(f1[:-1] * f1[1:] < 0):
        lo, hi = t.s[1 + i], t.s[2 + i]
        L = brentq(lambda x: sh.F(a, x)[0][0], lo, hi, xtol=1e-15, rtol=1e-15)
        F, b = sh.F(a, L)
        if sh.regime == "nongeodesic" and abs(F[1]) > 1e-6 * b["scale"]:
            continue
        cands.append(L)
    if not cands:
        raise NoConvergence("no zero of the first boundary target along the trajectory",
                            events=[e.as_dict() for e in t.events])
    return min(cands, key=lambda L: abs(L - L_guess))


def _shoot(density, Lam, guess, regime, *, tol, drift_tol, ftol, max_iter, L_max=None) -> ShootingResult:
    phi0, L_guess = float(guess["phi0"]), float(guess["L"])
    L_max = L_max or 2.0 * L_guess + 1.0
    sh = _Shooter(density, regime, tol, drift_tol, L_max)
    trace = []
    if isinstance(density, LogSquare) and abs(phi0) < 1e-6:
        raise RegimeViolation("log(H^2) trajectory starts with |H| < 1e-6")
    try:
        L = _scan_first_target(sh, phi0, L_guess)
    except ValueError as exc:
        raise NoConvergence(str(exc)) from exc
    except NoConvergence:
        if sh.traj(phi0).status == "domain":
            raise RegimeViolation("H reaches zero along a log(H^2) trajectory before the boundary") from None
        raise
    x = np.array([phi0, L])
    F, b = sh.F(*x)
    converged = False
    for it in range(max_iter):
        norm = float(np.max(np.abs(F / np.array([1.0, b["scale"]]))))
        trace.append({"iter": it, "phi0": float(x[0]), "L": float(x[1]), "norm": norm})
        if norm < ftol:
            converged = True
            break
        J = np.empty((2, 2))
        for j in range(2):
            dx = 1e-6 * max(abs(x[j]), 1e-3)
            xp = x.copy()
            xp[j] += dx
            try:
                J[:, j] = (sh.F(*xp)[0] - F) / dx
            except ValueError as exc:
                raise NoConvergence(f"Jacobian evaluation failed: {exc}", trace) from exc
        step = -np.linalg.lstsq(J, F, rcond=1e-10)[0]
        lam = 1.0
        while lam > 1e-4:
            xn = x + lam * step
            try:
                Fn, bn = sh.F(*xn)
                if np.max(np.abs(Fn / np.array([1.0, bn["scale"]]))) < norm:
                    break
            except ValueError:
                pass
            lam *= 0.5
        else:
            raise NoConvergence("line search failed", trace)
        x, F, b = xn, Fn, bn
    if not converged:
        raise NoConvergence("maximum iterations reached", trace)
    return _finish(sh, x, F, b, Lam, regime, trace)


def _finish(sh: _Shooter, x, F, b, Lam: CurveDensitySpec, regime: str, trace) -> ShootingResult:
    a, L = float(x[0]), float(x[1])
    kappa = 1.0 / b["r"]
    Ld, L0 = eval_curve_density(Lam, kappa, 1), eval_curve_density(Lam, kappa, 0)
    if regime == "geodesic":
        if abs(b["kn"]) < 1e-12:
            raise SingularBC("kappa_n vanishes on the geodesic boundary")
        eta = -b["Pd"] / (2 * b["kn"])
        beta = kappa * Ld - L0 - b["dPds"] / (2 * b["kn"])
    else:
        if abs(b["kg"]) < 1e-8 or abs(b["kn"]) < 1e-8:
            raise RegimeViolation("kappa_g or kappa_n vanishes at the converged boundary")
        eta = -b["Pd"] / (2 * b["kn"])
        beta = kappa * Ld - L0
    profile = sh.traj(a).truncated(L)
    params = EnergyParams(eta=eta, varpi=0.0, beta=beta, density=sh.density, boundary_density=Lam)
    report = evaluate_criticality(profile, params, regime)
    names = ("kappa_g", "P_plus_eta_K") if regime == "geodesic" else ("dPdot_ds", "bcnogeo3")
    return ShootingResult(a, L, eta, beta, dict(zip(names, map(float, F))), regime, trace, report, profile)


def shoot_geodesic(density: DensitySpec, Lam: CurveDensitySpec, guess: dict, *, tol: float = 1e-11,
                   drift_tol: float = 1e-9, ftol: float = 1e-9, max_iter: int = 50,
                   L_max: float | None = None) -> ShootingResult:
    """Solve for a disk whose boundary parallel is a geodesic.

    Targets are kappa_g(L) and P + eta K at L with eta = -P'/(2 kappa_n).
    L is first located by a zero-crossing scan of kappa_g along the guess
    trajectory; Newton steps use minimum-norm least squares because both
    targets vanish on the same curve of (phi'(0), L).
    """
    return _shoot(density, Lam, guess, "geodesic", tol=tol, drift_tol=drift_tol, ftol=ftol,
                  max_iter=max_iter, L_max=L_max)


def shoot_nongeodesic(density: DensitySpec, Lam: CurveDensitySpec, guess: dict, *, tol: float = 1e-11,
                      drift_tol: float = 1e-9, ftol: float = 1e-9, max_iter: int = 50,
                      L_max: float | None = None) -> ShootingResult:
    """Solve for a disk with a non-geodesic boundary parallel.

    Targets are P'_s(L) and 2P - (2H - kappa_n) P' at L; eta and beta are
    recovered afterwards. H staying away from zero is enforced for LogSquare
    by the integrator's domain stop.
    """
    res = _shoot(density, Lam, guess, "nongeodesic", tol=tol, drift_tol=drift_tol, ftol=ftol,
                 max_iter=max_iter, L_max=L_max)
    if isinstance(density, LogSquare) and np.any(np.abs(res.profile.H) < 1e-6):
        raise RegimeViolation("H approaches zero along a log(H^2) trajectory")
    return res

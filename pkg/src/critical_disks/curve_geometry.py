"""Frenet curves, rod first integrals and planar elastica conditions."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq

from .energy_models import CurveDensitySpec, eval_curve_density
from .errors import NoRoot, StepFailure
from .quadrature import integrate
from .rk import dopri5


@dataclass(frozen=True)
class CurveSample:
    s: float
    position: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float


@dataclass(frozen=True)
class Curve:
    """Evolved curve: arrays over the accepted steps plus a dense evaluator."""

    s: np.ndarray
    position: np.ndarray  # (n, 3)
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    dense: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def L(self) -> float:
        return float(self.s[-1])

    @property
    def closure_defect(self) -> float:
        return float(np.linalg.norm(self.position[-1] - self.position[0]))

    def samples(self) -> list[CurveSample]:
        return [
            CurveSample(float(self.s[i]), self.position[i], self.T[i], self.N[i], self.B[i],
                        float(self.kappa[i]), float(self.tau[i]))
            for i in range(self.s.size)
        ]

    def frame_at(self, s) -> np.ndarray:
        """Dense state (n, 12): position, T, N, B."""
        return self.dense(np.asarray(s, dtype=float))


@dataclass(frozen=True)
class ClosedCurve:
    curve: Curve
    period: float

    @property
    def closure_defect(self) -> float:
        return self.curve.closure_defect


def _orthonormalise(y: np.ndarray) -> np.ndarray:
    F = y[3:].reshape(3, 3)
    U, _, Vt = np.linalg.svd(F)
    out = y.copy()
    out[3:] = (U @ Vt).ravel()
    return out


def frenet_evolve(
    kappa: Callable[[float], float],
    tau: Callable[[float], float],
    L: float,
    *,
    tol: float = 1e-11,
    max_step: float = 0.05,
    X0=(0.0, 0.0, 0.0),
    frame0=None,
) -> Curve:
    """Integrate X' = T, T' = kappa N, N' = -kappa T + tau B, B' = -tau N on [0, L].

    The frame is projected to the nearest orthonormal matrix after each step.
    """
    if frame0 is None:
        frame0 = np.eye(3)
    y0 = np.concatenate([np.asarray(X0, dtype=float), np.asarray(frame0, dtype=float).ravel()])

    def rhs(s, y):
        k, t = kappa(s), tau(s)
        T, N, B = y[3:6], y[6:9], y[9:12]
        return np.concatenate([T, k * N, -k * T + t * B, -t * N])

    if L == 0:
        res_t, res_y = np.array([0.0]), y0[None, :]
        dense = None
    else:
        res = dopri5(rhs, 0.0, y0, L, rtol=tol, atol=tol, max_step=max_step, post_step=_orthonormalise)
        if res.status != "t_end":
            raise StepFailure(res.message or res.status)
        res_t, res_y = res.t, res.y
        dense = res.dense
    ks = np.array([kappa(s) for s in res_t], dtype=float)
    ts = np.array([tau(s) for s in res_t], dtype=float)
    return Curve(res_t, res_y[:, :3], res_y[:, 3:6], res_y[:, 6:9], res_y[:, 9:12], ks, ts, dense)


def estimate_kappa_tau(curve: Curve, h: float, s: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Re-estimate curvature and torsion by central differences of the frame."""
    if s is None:
        s = np.linspace(h, curve.L - h, 33)
    plus, minus = curve.frame_at(s + h), curve.frame_at(s - h)
    dT = (plus[:, 3:6] - minus[:, 3:6]) / (2 * h)
    dB = (plus[:, 9:12] - minus[:, 9:12]) / (2 * h)
    N = curve.frame_at(s)[:, 6:9]
    return np.linalg.norm(dT, axis=1), -np.einsum("ij,ij->i", dB, N)


def curve_to_csv(curve: Curve) -> str:
    out = io.StringIO()
    out.write("s,x,y,z,Tx,Ty,Tz,kappa,tau\n")
    for i in range(curve.s.size):
        row = (curve.s[i], *curve.position[i], *curve.T[i], curve.kappa[i], curve.tau[i])
        out.write(",".join(f"{float(x):.17g}" for x in row) + "\n")
    return out.getvalue()


# rods -------------------------------------------------------------------

@dataclass(frozen=True)
class RodFirstIntegral:
    V: np.ndarray  # (n, 3) ambient coordinates
    A: np.ndarray
    max_deviation: float

    def is_critical(self, tol: float = 1e-8) -> bool:
        return self.max_deviation < tol


def _sampled_derivative(values: np.ndarray, s: np.ndarray) -> np.ndarray:
    """4th-order central differences on uniform samples, quintic spline otherwise."""
    h = np.diff(s)
    if np.allclose(h, h[0], rtol=1e-9, atol=0):
        return np.gradient(values, h[0], edge_order=2) if values.size < 6 else _fd4(values, h[0])
    if values.size < 6:
        return np.gradient(values, s, edge_order=2)
    return make_interp_spline(s, values, k=5).derivative()(s)


def _fd4(v: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d[:2] = (-25 * v[:2] + 48 * v[1:3] - 36 * v[2:4] + 16 * v[3:5] - 3 * v[4:6]) / (12 * h)
    d[-2:] = (25 * v[-2:] - 48 * v[-3:-1] + 36 * v[-4:-2] - 16 * v[-5:-3] + 3 * v[-6:-4]) / (12 * h)
    return d


def rod_criticality(
    curve: ClosedCurve | Curve,
    Lam: CurveDensitySpec,
    eta: float,
    varpi: float,
    beta: float,
    dkappa: Callable[[np.ndarray], np.ndarray] | None = None,
) -> RodFirstIntegral:
    """Evaluate the rod vector field V along the curve in ambient coordinates.

    V = (kappa L' - L - beta) T + L'' kappa' N + (tau L' + eta tau - varpi kappa) B,
    with L = Lambda and primes on L meaning kappa-derivatives. The curve is
    critical when V is constant; ``max_deviation`` is measured from the
    arclength mean.
    """
    c = curve.curve if isinstance(curve, ClosedCurve) else curve
    k, t = c.kappa, c.tau
    kp = dkappa(c.s) if dkappa is not None else _sampled_derivative(k, c.s)
    L0, L1, L2 = (eval_curve_density(Lam, k, o) for o in (0, 1, 2))
    cT = k * L1 - L0 - beta
    cN = L2 * kp
    cB = t * L1 + eta * t - varpi * k
    V = cT[:, None] * c.T + np.asarray(cN)[:, None] * c.N + cB[:, None] * c.B
    if c.s.size > 1 and c.L > 0:
        A = trapezoid(V, c.s, axis=0) / c.L
    else:
        A = V[0]
    return RodFirstIntegral(V, A, float(np.max(np.linalg.norm(V - A, axis=1))))


def closure_integral(kappa, rho: float, Lam: CurveDensitySpec, beta: float, tol: float = 1e-12) -> float:
    """``int_0^rho (kappa L' - L - beta) ds`` over one period.

    ``kappa`` is a callable of s, or uniform samples at s_k = k rho / n
    (k = 0..n-1, endpoint excluded), integrated by the periodic trapezoid rule.
    """
    def integrand(k):
        return k * eval_curve_density(Lam, k, 1) - eval_curve_density(Lam, k, 0) - beta

    if callable(kappa):
        return integrate(lambda s: integrand(np.asarray(kappa(s), dtype=float)), np.linspace(0, rho, 9), tol)
    k = np.asarray(kappa, dtype=float)
    return float(np.sum(integrand(k)) * rho / k.size)


def planar_elastica_residual(kappa, dkappa, ddkappa, Lam: CurveDensitySpec, beta: float,
                             sigma_area: float = 0.0, sign: int = 0):
    """Pointwise ``(L')'' + kappa^2 L' - kappa (L + beta) + sign sigma``.

    ``(L')''`` is expanded by the chain rule: L''' kappa'^2 + L'' kappa''.
    ``sign = 0`` drops the area term.
    """
    if sign not in (-1, 0, 1):
        raise ValueError("sign must be -1, 0 or +1")
    k = np.asarray(kappa, dtype=float)
    kp, kpp = np.asarray(dkappa, dtype=float), np.asarray(ddkappa, dtype=float)
    L0, L1, L2, L3 = (eval_curve_density(Lam, k, o) for o in range(4))
    out = L3 * kp**2 + L2 * kpp + k**2 * L1 - k * (L0 + beta) + sign * sigma_area
    return float(out) if np.ndim(out) == 0 else out


# circle conditions --------------------------------------------------------

def circle_condition(Lam: CurveDensitySpec, beta: float, sigma_area: float = 0.0, sign: int = 0,
                     P0: float = 0.0) -> tuple[Callable, Callable, Callable]:
    """f(kappa) = kappa (kappa L' - L - beta) - P0 + sign sigma and its first two derivatives."""

    def f(k):
        L0, L1 = eval_curve_density(Lam, k, 0), eval_curve_density(Lam, k, 1)
        return k * (k * L1 - L0 - beta) - P0 + sign * sigma_area

    def df(k):
        L0, L1, L2 = (eval_curve_density(Lam, k, o) for o in range(3))
        return k * L1 + k * k * L2 - L0 - beta

    def ddf(k):
        L2, L3 = eval_curve_density(Lam, k, 2), eval_curve_density(Lam, k, 3)
        return 3 * k * L2 + k * k * L3

    return f, df, ddf


def _newton(g, dg, x, lo, hi, iters=50):
    for _ in range(iters):
        d = dg(x)
        if d == 0:
            break
        x_new = min(max(x - g(x) / d, lo), hi)
        if abs(x_new - x) <= 1e-16 * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def solve_circle_curvature(
    Lam: CurveDensitySpec,
    beta: float,
    sigma_area: float = 0.0,
    sign: int = 0,
    *,
    P0: float = 0.0,
    interval: tuple[float, float] = (1e-6, 1e3),
    n_scan: int = 20001,
) -> list[float]:
    """Positive circle curvatures solving the circle condition, ascending.

    Simple roots are bracketed by sign changes on a logarithmic grid and
    refined by bisection then Newton. Even-multiplicity roots show up as
    sign changes of f' where f is near zero; they are polished by Newton on f'.
    """
    f, df, ddf = circle_condition(Lam, beta, sigma_area, sign, P0)
    lo, hi = interval
    grid = np.geomspace(lo, hi, n_scan)
    fv, dv = f(grid), df(grid)
    scale = np.maximum(1.0, np.abs(grid) * np.abs(dv) + np.abs(fv))
    if np.all(np.abs(fv) <= 1e-13 * scale):
        raise NoRoot("circle condition vanishes identically (degenerate)")
    roots: list[float] = []
    for i in np.flatnonzero(fv[:-1] * fv[1:] <= 0):
        a, b = grid[i], grid[i + 1]
        if fv[i] == 0:
            x = a
        elif fv[i + 1] == 0:
            x = b
        else:
            x = brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        roots.append(_newton(f, df, x, a, b))
    for i in np.flatnonzero(dv[:-1] * dv[1:] < 0):
        a, b = grid[i], grid[i + 1]
        x = brentq(df, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        x = _newton(df, ddf, x, a, b)
        if abs(f(x)) <= 1e-12 * max(1.0, abs(x) * (abs(x * eval_curve_density(Lam, x, 1)) + abs(beta))):
            roots.append(x)
    roots.sort()
    unique: list[float] = []
    for x in roots:
        if not unique or abs(x - unique[-1]) > 1e-8 * max(1.0, x):
            unique.append(float(x))
    if not unique:
        raise NoRoot("no positive root in the scan interval")
    return unique

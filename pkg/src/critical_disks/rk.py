"""Dormand-Prince 5(4) integrator with dense output and step vetoes.

scipy's ``solve_ivp`` cannot reject an accepted step because an external
monitor (the first-integral drift) objects to it, so the stepper is kept
here. It is shared by the profile solver and the Frenet-frame evolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Butcher tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Shampine's quartic interpolant, columns multiply theta, theta^2, theta^3, theta^4.
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0


@dataclass(frozen=True)
class Segment:
    """Dense output on one accepted step [t0, t0 + h]."""

    t0: float
    h: float
    y0: np.ndarray
    Q: np.ndarray  # (n, 4)

    @property
    def t1(self) -> float:
        return self.t0 + self.h

    def __call__(self, t):
        theta = (np.asarray(t, dtype=float) - self.t0) / self.h
        powers = np.stack([theta, theta**2, theta**3, theta**4])
        return self.y0[:, None] + self.h * (self.Q @ powers.reshape(4, -1))


@dataclass
class RKResult:
    t: np.ndarray
    y: np.ndarray  # (n_steps + 1, n)
    segments: list[Segment] = field(default_factory=list)
    status: str = "t_end"
    n_rejected: int = 0
    message: str = ""

    def dense(self, t) -> np.ndarray:
        """Evaluate the interpolant at times ``t`` (array), shape (len(t), n)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((t.size, self.y.shape[1]))
        starts = np.array([seg.t0 for seg in self.segments])
        idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(self.segments) - 1)
        for k in np.unique(idx):
            mask = idx == k
            out[mask] = self.segments[k](t[mask]).T
        return out


def _error_norm(err, scale):
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def dopri5(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0,
    t_end: float,
    *,
    rtol: float = 1e-9,
    atol: float = 1e-9,
    h0: float | None = None,
    max_step: float = np.inf,
    h_min: float = 1e-14,
    max_steps: int = 200_000,
    accept: Callable[[float, np.ndarray], bool] | None = None,
    post_step: Callable[[np.ndarray], np.ndarray] | None = None,
    on_step: Callable[[Segment, np.ndarray], str | None] | None = None,
) -> RKResult:
    """Integrate ``y' = fun(t, y)`` from ``t0`` to ``t_end``.

    Parameters
    ----------
    accept
        Optional veto ``accept(t, y) -> bool`` consulted after the error test.
        A vetoed step is retried with half the step size; if the step falls
        below ``h_min`` the run ends with status ``"veto"``.
    post_step
        Optional projection applied to each accepted state (e.g. frame
        re-orthonormalisation).
    on_step
        Called with the accepted segment and the new state; returning a
        non-empty string stops the integration with that status.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0
    f = np.asarray(fun(t, y), dtype=float)
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((f / scale) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, abs(t_end - t0), max_step)
    h = float(h0)
    ts, ys, segments = [t], [y.copy()], []
    n_rejected = 0
    status, message = "t_end", ""
    K = np.empty((7, y.size))
    for _ in range(max_steps):
        if direction * (t_end - t) <= 0:
            break
        h = min(h, max_step, abs(t_end - t))
        while True:
            if h < h_min:
                status = "h_min" if status != "veto" else status
                message = f"step size underflow at t={t!r}"
                break
            step = direction * h
            K[0] = f
            for s in range(1, 6):
                dy = step * (np.asarray(A[s]) @ K[:s])
                K[s] = fun(t + C[s] * step, y + dy)
            y_new = y + step * (B @ K[:6])
            t_new = t + step
            if direction * (t_end - t_new) < 1e-15 * max(1.0, abs(t_end)):
                t_new = t_end
            f_new = np.asarray(fun(t_new, y_new), dtype=float)
            K[6] = f_new
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = _error_norm(step * (E @ K), scale)
            if not np.isfinite(err):
                n_rejected += 1
                h *= MIN_FACTOR
                continue
            if err > 1.0:
                n_rejected += 1
                h *= max(MIN_FACTOR, SAFETY * err**-0.2)
                continue
            if accept is not None and not accept(t_new, y_new):
                n_rejected += 1
                h *= 0.5
                status = "veto"
                continue
            status = "t_end"
            break
        if status in ("h_min", "veto"):
            if status == "veto":
                message = f"step vetoed down to h_min at t={t!r}"
            break
        seg = Segment(t, step, y.copy(), (K.T @ P).copy())
        if post_step is not None:
            y_new = post_step(y_new)
            f_new = np.asarray(fun(t_new, y_new), dtype=float)
        t, y, f = t_new, y_new, f_new
        ts.append(t)
        ys.append(y.copy())
        segments.append(seg)
        factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err**-0.2)
        h = abs(step) * factor
        if on_step is not None:
            stop = on_step(seg, y)
            if stop:
                status = stop
                break
    else:
        status, message = "max_steps", "maximum number of steps reached"
    return RKResult(np.array(ts), np.array(ys), segments, status, n_rejected, message)

"""Profile curve data shared by the geometry, residual and solver modules.

Orientation: the profile (r(s), z(s)) runs outward from the axis with
r' = cos(phi), z' = sin(phi). The unit normal is
nu = (-sin(phi) cos t, -sin(phi) sin t, cos(phi)), so the meridian and
parallel curvatures are phi' and sin(phi)/r and the unit sphere has H = -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ORIENTATION_BRANCH = "nu=(-sin(phi)cos(t),-sin(phi)sin(t),cos(phi)); H=(phi'+sin(phi)/r)/2; unit sphere H=-1"

FIELDS = ("r", "z", "phi", "H", "dphi", "dH", "ddH")


@dataclass(frozen=True)
class ProfileState:
    s: float
    r: float
    z: float
    phi: float
    H: float


@dataclass(frozen=True)
class Event:
    kind: str
    s: float
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "s": self.s, **self.detail}


class ProfileTrajectory:
    """Sampled profile with a dense evaluator.

    Attributes hold node samples; ``evaluate`` returns interpolated (or
    closed-form) values of r, z, phi, H, phi', H', H'' anywhere in [0, L].
    """

    def __init__(
        self,
        samples: dict[str, np.ndarray],
        dense: Callable[[np.ndarray], dict[str, np.ndarray]],
        *,
        breakpoints: np.ndarray | None = None,
        drift: np.ndarray | None = None,
        events: list[Event] | tuple = (),
        status: str = "complete",
        meta: dict | None = None,
    ):
        self.s = np.asarray(samples["s"], dtype=float)
        for name in FIELDS:
            setattr(self, name, np.asarray(samples[name], dtype=float))
        self.extra = {k: np.asarray(v) for k, v in samples.items() if k not in FIELDS + ("s",)}
        self._dense = dense
        self.breakpoints = self.s if breakpoints is None else np.asarray(breakpoints, dtype=float)
        self.drift = np.zeros_like(self.s) if drift is None else np.asarray(drift, dtype=float)
        self.events = list(events)
        self.status = status
        self.meta = dict(meta or {})

    @property
    def L(self) -> float:
        return float(self.s[-1])

    @property
    def boundary(self) -> ProfileState:
        return self.state(-1)

    def state(self, i: int) -> ProfileState:
        return ProfileState(float(self.s[i]), float(self.r[i]), float(self.z[i]), float(self.phi[i]), float(self.H[i]))

    def states(self) -> list[ProfileState]:
        return [self.state(i) for i in range(self.s.size)]

    def evaluate(self, s) -> dict[str, np.ndarray]:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return self._dense(s)

    def breakpoints_between(self, a: float, b: float) -> np.ndarray:
        bp = self.breakpoints
        inner = bp[(bp > a) & (bp < b)]
        return np.concatenate([[a], inner, [b]])

    def truncated(self, L: float) -> "ProfileTrajectory":
        """Same curve restricted to [0, L] with a sample added at L."""
        keep = self.s < L
        end = self.evaluate(L)
        samples = {"s": np.append(self.s[keep], L)}
        for name in FIELDS:
            samples[name] = np.append(getattr(self, name)[keep], end[name][0])
        for k, v in self.extra.items():
            if k in end:
                samples[k] = np.append(v[keep], end[k][0])
        drift = np.append(self.drift[keep], self.drift[keep][-1] if keep.any() else 0.0)
        return ProfileTrajectory(
            samples,
            self._dense,
            breakpoints=self.breakpoints_between(0.0, L),
            drift=drift,
            events=[e for e in self.events if e.s <= L],
            status=self.status,
            meta=self.meta,
        )

"""Surfaces of revolution: curvatures, parallels, meshes and diagnostics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AxisError, DegenerateProfile
from .profile import ORIENTATION_BRANCH, ProfileState, ProfileTrajectory
from .quadrature import integrate

__all__ = [
    "ORIENTATION_BRANCH",
    "ParallelData",
    "RevolvedMesh",
    "axis_curvatures",
    "gauss_bonnet_defect",
    "hemisphere_profile",
    "mesh_area",
    "parallel_data",
    "planar_disk_profile",
    "profile_curvatures",
    "profile_to_csv",
    "profile_from_csv",
    "revolve",
    "sphere_cap_profile",
    "surface_area",
]


def profile_curvatures(state: ProfileState, dphi: float) -> dict:
    """Principal, mean and Gaussian curvature at a point off the axis."""
    if not state.r > 0:
        raise AxisError("curvatures need r > 0; use axis_curvatures on the axis")
    k_m = float(dphi)
    k_p = math.sin(state.phi) / state.r
    return {"H": 0.5 * (k_m + k_p), "K": k_m * k_p, "k_meridian": k_m, "k_parallel": k_p}


def axis_curvatures(dphi0: float) -> dict:
    """Umbilic limit at a smooth axis point."""
    return {"H": float(dphi0), "K": float(dphi0) ** 2, "k_meridian": float(dphi0), "k_parallel": float(dphi0)}


@dataclass(frozen=True)
class ParallelData:
    kappa_g: float
    kappa_n: float
    tau_g: float
    kappa: float
    theta: float

    def as_dict(self) -> dict:
        return {
            "kappa_g": self.kappa_g,
            "kappa_n": self.kappa_n,
            "tau_g": self.tau_g,
            "kappa": self.kappa,
            "theta": self.theta,
        }


def parallel_data(state: ProfileState) -> ParallelData:
    """Darboux data of the parallel through ``state``.

    With the module orientation kappa_n = sin(phi)/r and kappa_g = -cos(phi)/r,
    so kappa_g = kappa sin(theta), kappa_n = kappa cos(theta).
    """
    if not state.r > 0:
        raise AxisError("parallel through the axis is a point")
    kappa = 1.0 / state.r
    kg = -math.cos(state.phi) / state.r
    kn = math.sin(state.phi) / state.r
    theta = math.atan2(kg, kn)
    assert abs(kg * kg + kn * kn - kappa * kappa) <= 1e-10 * max(1.0, kappa * kappa)
    return ParallelData(kg, kn, 0.0, kappa, theta)


# closed-form profiles -----------------------------------------------------

def sphere_cap_profile(H0: float, L: float, z0: float = 1.0, n: int = 257) -> ProfileTrajectory:
    """Profile of constant mean curvature ``H0`` (sphere of radius 1/|H0|, or plane) up to length L."""
    H0 = float(H0)

    def dense(s):
        s = np.asarray(s, dtype=float)
        if H0 == 0.0:
            r, z, phi = s.copy(), np.full_like(s, z0), np.zeros_like(s)
        else:
            r = np.sin(H0 * s) / H0
            z = z0 + (1.0 - np.cos(H0 * s)) / H0
            phi = H0 * s
        zero = np.zeros_like(s)
        return {"r": r, "z": z, "phi": phi, "H": np.full_like(s, H0), "dphi": np.full_like(s, H0),
                "dH": zero, "ddH": zero}

    s = np.linspace(0.0, L, n)
    samples = {"s": s, **dense(s)}
    samples["r"][0] = 0.0
    return ProfileTrajectory(samples, dense, meta={"kind": "sphere_cap", "H0": H0, "z0": z0})


def hemisphere_profile(R: float = 1.0, z0: float = 1.0, n: int = 257) -> ProfileTrajectory:
    return sphere_cap_profile(-1.0 / R, 0.5 * math.pi * R, z0, n)


def planar_disk_profile(R: float = 1.0, z0: float = 1.0, n: int = 257) -> ProfileTrajectory:
    return sphere_cap_profile(0.0, R, z0, n)


# quadrature diagnostics ---------------------------------------------------

def surface_area(profile: ProfileTrajectory, tol: float = 1e-9) -> float:
    return integrate(lambda s: 2 * np.pi * profile.evaluate(s)["r"], profile.breakpoints_between(0.0, profile.L), tol)


def gauss_bonnet_defect(profile: ProfileTrajectory, tol: float = 1e-10) -> float:
    """``2 pi - int K dSigma - int k_g ds`` for a disk-type profile.

    ``k_g`` is the geodesic curvature of the boundary with respect to the
    inward conormal, ``cos(phi_L)/r_L``; ``K r`` is integrated as
    ``phi' sin(phi)``.
    """

    def f(s):
        v = profile.evaluate(s)
        return 2 * np.pi * v["dphi"] * np.sin(v["phi"])

    total_K = integrate(f, profile.breakpoints_between(0.0, profile.L), tol)
    b = profile.boundary
    return 2 * math.pi - total_K - 2 * math.pi * math.cos(b.phi)


# meshes -----------------------------------------------------------------

@dataclass(frozen=True)
class RevolvedMesh:
    vertices: np.ndarray  # (n_v, 3); index 0 is the pole
    faces: np.ndarray  # (n_f, 3), 0-based
    boundary_loop: np.ndarray  # ordered vertex indices of the last parallel
    H: np.ndarray
    K: np.ndarray
    grid_shape: tuple[int, int]  # (rings including the pole row, n_t)


def _vertex_curvatures(v: dict, i: int) -> tuple[float, float]:
    r, phi, dphi = v["r"][i], v["phi"][i], v["dphi"][i]
    if r <= 0:
        if phi == 0.0:
            c = axis_curvatures(dphi)
            return c["H"], c["K"]
        return math.nan, math.nan  # cone point
    kp = math.sin(phi) / r
    return 0.5 * (dphi + kp), dphi * kp


def revolve(profile: ProfileTrajectory, n_t: int, n_s: int | None = None) -> RevolvedMesh:
    """Triangulate the surface swept by the profile.

    The profile is resampled at ``n_s`` uniform arclength rings (default
    ``n_t``); the pole is a single vertex joined to the first ring by a fan.
    """
    if n_t < 8:
        raise ValueError("n_t must be at least 8")
    n_s = n_t if n_s is None else int(n_s)
    s = np.linspace(0.0, profile.L, n_s + 1)
    v = profile.evaluate(s)
    r, z = v["r"].copy(), v["z"]
    r[0] = 0.0
    if np.any(r[1:] <= 0):
        raise DegenerateProfile("profile meets the axis in the interior")
    t = 2 * np.pi * np.arange(n_t) / n_t
    ring = np.stack([r[1:, None] * np.cos(t), r[1:, None] * np.sin(t), np.broadcast_to(z[1:, None], (n_s, n_t))], axis=-1)
    vertices = np.vstack([[[0.0, 0.0, z[0]]], ring.reshape(-1, 3)])
    curv = np.array([_vertex_curvatures(v, i) for i in range(n_s + 1)])
    H = np.concatenate([[curv[0, 0]], np.repeat(curv[1:, 0], n_t)])
    K = np.concatenate([[curv[0, 1]], np.repeat(curv[1:, 1], n_t)])

    def idx(i, j):  # ring i >= 1
        return 1 + (i - 1) * n_t + (j % n_t)

    j = np.arange(n_t)
    faces = [np.stack([np.zeros(n_t, dtype=int), idx(1, j), idx(1, j + 1)], axis=1)]
    for i in range(1, n_s):
        a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
        faces.append(np.stack([a, b, c], axis=1))
        faces.append(np.stack([a, c, d], axis=1))
    faces = np.vstack(faces)
    mesh = RevolvedMesh(vertices, faces, idx(n_s, j), H, K, (n_s + 1, n_t))
    areas = _triangle_areas(mesh)
    diag2 = float(np.sum((vertices.max(axis=0) - vertices.min(axis=0)) ** 2))
    if np.any(areas <= 1e-14 * diag2):
        raise DegenerateProfile("mesh contains degenerate triangles")
    return mesh


def _triangle_areas(mesh: RevolvedMesh) -> np.ndarray:
    p = mesh.vertices[mesh.faces]
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


def mesh_area(mesh: RevolvedMesh) -> float:
    return float(_triangle_areas(mesh).sum())


def boundary_loop_length(mesh: RevolvedMesh) -> float:
    p = mesh.vertices[mesh.boundary_loop]
    return float(np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1).sum())


# export ----------------------------------------------------------------

def _g9(x: float) -> str:
    return f"{x:.9g}"


def mesh_to_obj(mesh: RevolvedMesh) -> str:
    out = io.StringIO()
    for p in mesh.vertices:
        out.write("v " + " ".join(_g9(c) for c in p) + "\n")
    for f in mesh.faces + 1:
        out.write(f"f {f[0]} {f[1]} {f[2]}\n")
    loop = list(mesh.boundary_loop + 1) + [mesh.boundary_loop[0] + 1]
    out.write("l " + " ".join(str(i) for i in loop) + "\n")
    return out.getvalue()


def _g17(x: float) -> str:
    return f"{x:.17g}"


def profile_to_csv(profile: ProfileTrajectory) -> str:
    """CSV with columns s,r,z,phi,H,K at the stored samples."""
    out = io.StringIO()
    out.write("s,r,z,phi,H,K\n")
    for i in range(profile.s.size):
        r, phi, dphi = profile.r[i], profile.phi[i], profile.dphi[i]
        if r > 0:
            K = dphi * math.sin(phi) / r
        else:
            K = dphi * dphi if phi == 0.0 else math.nan
        row = (profile.s[i], r, profile.z[i], phi, profile.H[i], K)
        out.write(",".join(_g17(float(x)) for x in row) + "\n")
    return out.getvalue()


def profile_from_csv(text: str) -> ProfileTrajectory:
    """Rebuild a profile from CSV samples using cubic splines."""
    rows = list(csv.DictReader(io.StringIO(text)))
    data = {k: np.array([float(row[k]) for row in rows]) for k in ("s", "r", "z", "phi", "H")}
    s = data["s"]
    splines = {k: CubicSpline(s, data[k]) for k in ("r", "z", "phi", "H")}

    def dense(x):
        x = np.asarray(x, dtype=float)
        return {
            "r": splines["r"](x), "z": splines["z"](x), "phi": splines["phi"](x), "H": splines["H"](x),
            "dphi": splines["phi"](x, 1), "dH": splines["H"](x, 1), "ddH": splines["H"](x, 2),
        }

    samples = {"s": s, **dense(s)}
    for k in ("r", "z", "phi", "H"):
        samples[k] = data[k]
    return ProfileTrajectory(samples, dense, meta={"kind": "csv"})

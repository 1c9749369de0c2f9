"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line with its runtime.

Run alone with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""

import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from critical_disks.axisym_solver import (
    StopSpec,
    drift_ok,
    helfrich_first_integral,
    integrate_profile,
    shoot_geodesic,
    shoot_nongeodesic,
    sweep_phi0,
)
from critical_disks.cli import main
from critical_disks.curve_geometry import circle_condition, estimate_kappa_tau, frenet_evolve, solve_circle_curvature
from critical_disks.el_residuals import flux_value
from critical_disks.energy_models import (
    EnergyParams,
    ExpSquare,
    LogSquare,
    PWillmore,
    Quadratic,
    eval_density,
    surface_integral,
    total_energy,
)
from critical_disks.errors import InfeasibleCap
from critical_disks.special_solutions import build_cap, weingarten_kn, weingarten_profile, WeingartenSpec
from critical_disks.surface_geometry import (
    gauss_bonnet_defect,
    hemisphere_profile,
    parallel_data,
    sphere_cap_profile,
    surface_area,
)

RESULTS: list[str] = []
TIMINGS: dict[str, float] = {}
CONFIGS = Path(__file__).resolve().parents[1] / "configs"
HELFRICH = PWillmore(1.0, -2.0, 2)
DENSITIES = {"exp_square": ExpSquare(), "helfrich": HELFRICH, "log_square": LogSquare()}


@contextmanager
def criterion(n: int, title: str, budget: float, capsys, offset: float = 0.0):
    t0 = time.perf_counter() - offset
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < budget, f"runtime {elapsed:.2f} s exceeds {budget} s"
        status = "PASS"
    finally:
        line = f"[{status}] criterion {n:2d}: {title} ({time.perf_counter() - t0:.2f} s, budget {budget:g} s)"
        RESULTS.append(line)
        with capsys.disabled():
            print("\n" + line)


def _caps():
    Lam = Quadratic()
    return {
        1: build_cap(1, 1.0, -1.0, Lam, 4.0),
        2: build_cap(2, 1.0, 0.0, Lam, 1.0),
        **{p: build_cap(p, 1.0, 1.0, Lam, 9.0) for p in (3, 4, 5)},
    }


@pytest.fixture(scope="module")
def shots():
    t0 = time.perf_counter()
    out = {
        "exp_square": shoot_geodesic(DENSITIES["exp_square"], Quadratic(), {"phi0": -1.5, "L": 1.0}),
        "helfrich": shoot_nongeodesic(HELFRICH, Quadratic(), {"phi0": -3.0, "L": 1.14}),
        "log_square": shoot_nongeodesic(DENSITIES["log_square"], Quadratic(), {"phi0": -1.42, "L": 1.25}),
    }
    TIMINGS["shooting"] = time.perf_counter() - t0
    return out


def test_criterion_01_cap_suite(capsys):
    with criterion(1, "spherical-cap criticality suite", 1.0, capsys):
        caps = _caps()
        assert (caps[1].spec.eta, caps[1].spec.H_o) == (0.25, -2.0)
        assert caps[2].spec.eta == -1.0
        for p in (3, 4, 5):
            s = caps[p].spec
            assert s.H_o == -2.0 / (p - 2)
            assert abs(p**p * (-1.0) ** (p - 2) + 4 * s.eta * (p - 2) ** (p - 2)) < 1e-12
        for cap in caps.values():
            r = cap.report
            for v in (r.el1_max, r.el2, r.el3, r.el4, *(r.extra[k] for k in ("elf1_max", "elf2", "elf3", "elf4"))):
                assert abs(v) < 1e-10
        with pytest.raises(InfeasibleCap):
            build_cap(3, 1.0, 1.0, Quadratic(), 1.0, kappa_o=1.0)
        with pytest.raises(InfeasibleCap):
            build_cap(1, 1.0, -1.0, Quadratic(), 1.0)


def test_criterion_02_exact_sphere_regression(capsys):
    with criterion(2, "exact-solution ODE regression", 5.0, capsys):
        dens, Ho = PWillmore(1.0, 1.0, 3), -2.0
        stop = StopSpec(max_length=math.pi / 2 / abs(Ho))
        errs = []
        for tol in (1e-6, 1e-9, 1e-12):
            traj = integrate_profile(Ho, dens, stop, tol=tol)
            assert math.isclose(traj.L, stop.max_length)
            errs.append(float(np.max(np.abs(traj.H - Ho))))
        assert errs[1] < 1e-8
        slopes = [math.log10(errs[i] / errs[i + 1]) / 3 for i in range(2)]
        assert all(0.75 < k < 1.25 for k in slopes), (errs, slopes)


def test_criterion_03_first_integral_sweep(capsys):
    with criterion(3, "first-integral conservation over 64-point sweeps", 60.0, capsys):
        grid = np.linspace(-3.0, -0.1, 64)
        stop = StopSpec(max_length=4.0, strict=False, h_max=50.0)
        for dens in (ExpSquare(), HELFRICH, LogSquare()):
            trajs = sweep_phi0(dens, grid, stop, tol=1e-11, drift_tol=1e-9)
            assert len(trajs) == 64
            bad = [t.meta["phi0"] for t in trajs if not drift_ok(t, 1e-9)]
            assert not bad, (dens, bad)


def test_criterion_04_helfrich_relation(shots, capsys):
    with criterion(4, "Helfrich integrated relation", 5.0, capsys):
        res = shots["helfrich"]
        assert res.report.critical
        assert helfrich_first_integral(res.profile, 1.0, -2.0)["std"] < 1e-6


def test_criterion_05_shooting_and_rescaling(shots, capsys):
    # the budget covers the shooting done once in the shared fixture
    with criterion(5, "shooting with independent rescaling identity", 120.0, capsys, TIMINGS["shooting"]):
        for name, res in shots.items():
            rep = res.report
            for v in (rep.el1_max, rep.el2, rep.el3, rep.el4, *rep.bc.values()):
                assert abs(v) < 1e-6, name
            assert abs(rep.rescaling_defect) < 1e-6, (name, rep.rescaling_defect)
            # the volume integrand does not vanish pointwise, so the identity is not vacuous
            H = res.profile.H
            dens = DENSITIES[name]
            integrand = 2 * eval_density(dens, H, 0) - H * eval_density(dens, H, 1)
            assert np.max(np.abs(integrand)) > 1e-2, name
        assert shots["exp_square"].regime == "geodesic"
        assert shots["helfrich"].regime == shots["log_square"].regime == "nongeodesic"


def test_criterion_06_weingarten(capsys):
    with criterion(6, "Weingarten family", 10.0, capsys):
        c = 1.0
        for d in (1.5, 2.0, 4.0):
            w = weingarten_profile(WeingartenSpec(c, d))
            assert np.max(np.abs(w.K_minus_2cH)) < 1e-6
            assert abs(weingarten_kn(w.boundary_chi, c) - 2 * c) < 1e-8
            assert np.all(w.chi >= -c) and np.all(w.chi <= -2 * c / 3)


def _brute_force_roots(f, n=10**6, hi=1e3):
    x = np.linspace(hi / n, hi, n)
    v = f(x)
    roots = list(x[v == 0])
    for i in np.flatnonzero(v[:-1] * v[1:] < 0):
        a, b = x[i], x[i + 1]
        fa = f(a)
        while b - a > 1e-13:
            m = 0.5 * (a + b)
            fm = f(m)
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return sorted(roots)


def test_criterion_07_circle_algebra(capsys):
    with criterion(7, "planar elastic-boundary algebra", 1.0, capsys):
        for args, expected in (((Quadratic(), 4.0, 0.0, 0), [2.0]), ((Quadratic(), 3.0, 2.0, 1), [1.0])):
            roots = solve_circle_curvature(*args)
            assert len(roots) == len(expected)
            assert all(abs(r - e) < 1e-10 for r, e in zip(roots, expected))
            oracle = _brute_force_roots(circle_condition(*args)[0])
            assert len(oracle) == len(roots)
            assert all(abs(r - o) < 1e-10 for r, o in zip(roots, oracle))


def test_criterion_08_geometry_invariants(shots, capsys):
    with criterion(8, "geometry invariants", 5.0, capsys):
        profiles = [c.profile for c in _caps().values()] + [r.profile for r in shots.values()]
        for prof in profiles:
            assert abs(gauss_bonnet_defect(prof)) < 1e-6
            for i in range(1, prof.s.size):
                pd = parallel_data(prof.state(i))
                assert abs(pd.kappa_g**2 + pd.kappa_n**2 - pd.kappa**2) < 1e-9 * max(1.0, pd.kappa**2)
        for kappa, tau in ((lambda s: 1.0 + 0 * s, lambda s: 0 * s), (lambda s: 0.8 + 0 * s, lambda s: 0.6 + 0 * s)):
            c = frenet_evolve(kappa, tau, 6.0, tol=1e-13)
            s = np.linspace(0.5, 5.5, 11)
            errs = []
            for h in (0.04, 0.02, 0.01):
                k, t = estimate_kappa_tau(c, h, s)
                errs.append(max(np.max(np.abs(k - kappa(s))), np.max(np.abs(t - tau(s)))))
            assert all(3.5 < errs[i] / errs[i + 1] < 4.5 for i in range(2)), errs


def test_criterion_09_flux_rigidity(shots, capsys):
    with criterion(9, "flux-formula rigidity spot checks", 2.0, capsys):
        surfaces = [sphere_cap_profile(-1.3, 1.0), hemisphere_profile(), shots["exp_square"].profile]
        for prof in surfaces:
            assert abs(flux_value(prof, 0.0, 2)) < 1e-8
        assert abs(flux_value(sphere_cap_profile(-2.0, math.pi / 4), 1.0, 3)) < 1e-8
        c0 = -1.0
        cap = build_cap(1, 1.0, c0, Quadratic(), 4.0)
        assert abs(flux_value(cap.profile, c0, 1)) < 1e-8
        params = EnergyParams(0.0, 0.0, 0.0, PWillmore(1.0, c0, 1), Quadratic())
        w1 = total_energy(cap.profile, params).surface_P
        assert abs(w1 - c0 * surface_area(cap.profile)) < 1e-8
        assert abs(w1 - surface_integral(cap.profile, lambda v: v["H"] - c0)) < 1e-12


def test_criterion_10_cli_determinism(tmp_path, capsys):
    with criterion(10, "CLI determinism", 120.0, capsys):
        for cfg in sorted(CONFIGS.glob("*.toml")):
            cmd = next(ln.split('"')[1] for ln in cfg.read_text().splitlines() if ln.startswith("command"))
            outs = [tmp_path / f"{cfg.stem}-{k}" for k in range(2)]
            for k, out in enumerate(outs):
                main([cmd, str(cfg), "--out", str(out), "--jobs", str(k + 1)])
            files = sorted(f.name for f in outs[0].iterdir() if f.suffix in (".csv", ".obj", ".json"))
            assert "report.json" in files
            for name in files:
                assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), (cfg.name, name)

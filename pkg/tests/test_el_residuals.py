import json
import math
from importlib import resources

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critical_disks.axisym_solver import StopSpec, integrate_profile
from critical_disks.el_residuals import (
    BoundaryPoint,
    G_jet,
    boundary_residuals,
    cap_criticality,
    cmc_classify,
    evaluate_criticality,
    flux_value,
    geodesic_bc,
    interior_residual,
    j_prime_darboux,
    j_prime_frenet,
    nongeodesic_bc,
    pwillmore_interior_residual,
    rescaling_defect,
    rescaling_terms,
)
from critical_disks.energy_models import (
    EnergyParams,
    ExpSquare,
    Polynomial,
    PWillmore,
    Quadratic,
    TotalCurvature,
    eval_curve_density,
    eval_density,
    surface_integral,
)
from critical_disks.errors import BranchError, DifferentiationError, InfeasibleCap, SingularG
from critical_disks.profile import ProfileState
from critical_disks.surface_geometry import (
    hemisphere_profile,
    parallel_data,
    planar_disk_profile,
    sphere_cap_profile,
    surface_area,
)


def closure(Lam, k, beta):
    return k * eval_curve_density(Lam, k, 1) - eval_curve_density(Lam, k, 0) - beta


def test_interior_residual_on_critical_sphere():
    prof = sphere_cap_profile(-2.0, math.pi / 4)
    assert interior_residual(prof, PWillmore(1.0, 1.0, 3)).max_abs < 1e-10
    assert pwillmore_interior_residual(prof, 1.0, 3).max_abs < 1e-10
    assert interior_residual(prof, PWillmore(1.0, 0.0, 3)).max_abs > 1.0


def test_interior_residual_on_plane():
    plane = planar_disk_profile(2.0)
    assert interior_residual(plane, PWillmore(1.0, 0.0, 2)).max_abs == 0.0
    # for p = 1 the equation reads K - 2 c0 H = 0
    assert pwillmore_interior_residual(plane, 1.0, 1).max_abs == 0.0


def test_interior_residual_numeric_matches_analytic():
    traj = integrate_profile(-1.5, ExpSquare(), StopSpec(max_length=1.0), tol=1e-11)
    a = interior_residual(traj, ExpSquare(), "analytic")
    n = interior_residual(traj, ExpSquare(), "numeric", tol=1e-4)
    scale = np.max(np.abs(4 * traj.H * eval_density(ExpSquare(), traj.H)))
    assert a.max_abs < 1e-8 * scale
    assert n.max_abs < 1e-5 * scale


def test_numeric_residual_reports_coarse_spacing():
    traj = integrate_profile(-1.5, ExpSquare(), StopSpec(max_length=1.0), tol=1e-11)
    with pytest.raises(DifferentiationError):
        interior_residual(traj, ExpSquare(), "numeric", tol=1e-14)


def _params(density, eta=0.0, beta=0.0, varpi=0.0, Lam=Quadratic()):
    return EnergyParams(eta, varpi, beta, density, Lam)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_planar_disk_boundary(beta):
    R = 1.3
    bp = BoundaryPoint.from_parallel(parallel_data(planar_disk_profile(R).boundary))
    for p in (2, 3, 4):
        res = boundary_residuals(bp, _params(PWillmore(1.0, 0.0, p), 0.7, beta), 0.0, 0.0, 0.0, K=0.0)
        k = 1 / R
        assert abs(res["el2"]) < 1e-15 and abs(res["el3"]) < 1e-15
        assert math.isclose(res["el4"], -k * closure(Quadratic(), k, beta), rel_tol=1e-13, abs_tol=1e-14)


def test_p2_cap_boundary_residuals():
    beta = 1.5
    k = math.sqrt(beta)
    Ho = -k  # hemisphere cut at its equator
    prof = sphere_cap_profile(Ho, math.pi / 2 / k)
    rep = evaluate_criticality(prof, _params(PWillmore(1.0, 0.0, 2), -1.0, beta), "cap", tol=1e-10)
    assert max(abs(rep.el1_max), abs(rep.el2), abs(rep.el3), abs(rep.el4)) < 1e-10
    assert rep.critical


def test_geodesic_el3_reduction():
    bp = BoundaryPoint(kappa=0.8, theta=math.pi)
    beta, dn_Pdot = 0.3, 1.7
    res = boundary_residuals(bp, _params(ExpSquare(), 0.4, beta), -0.9, 0.5, dn_Pdot)
    assert math.isclose(res["el3"], 2 * closure(Quadratic(), 0.8, beta) * bp.kn - dn_Pdot, rel_tol=1e-13)


@given(st.floats(0.2, 3), st.floats(-3, -0.1), st.floats(-2, 2), st.floats(-2, 2), st.sampled_from([0.0, math.pi]))
@settings(max_examples=50)
def test_geodesic_regime_reduction(kappa, H, eta, dn_Pdot, theta):
    params = _params(ExpSquare(), eta, 0.7)
    bp = BoundaryPoint(kappa=kappa, theta=theta)
    K = bp.kn * (2 * H - bp.kn)
    res = boundary_residuals(bp, params, H, 0.0, dn_Pdot, K=K)
    bc = geodesic_bc(bp.kn, K, kappa, H, dn_Pdot, params)
    assert abs(res["el2"] - bc["bcgeo1"]) < 1e-12 * (1 + abs(res["el2"]))
    assert abs(res["el3"] - bc["bcgeo2"]) < 1e-12 * (1 + abs(res["el3"]))
    assert abs(res["el4"] - bc["bcgeo3"]) < 1e-12 * (1 + abs(res["el4"]))


@given(st.floats(0.3, 3), st.floats(0.2, 1.4), st.floats(-3, -0.2))
@settings(max_examples=50)
def test_nongeodesic_regime_reduction(beta, theta, H):
    Lam = Quadratic()
    kappa = math.sqrt(beta)  # closure condition holds
    bp = BoundaryPoint(kappa=kappa, theta=theta)
    dens = ExpSquare()
    eta = -eval_density(dens, H, 1) / (2 * bp.kn)
    params = _params(dens, eta, beta, Lam=Lam)
    K = bp.kn * (2 * H - bp.kn)
    res = boundary_residuals(bp, params, H, 0.0, 0.0, K=K)
    bc = nongeodesic_bc(bp.kn, kappa, H, 0.0, params)
    scale = 1 + abs(eval_density(dens, H, 1))
    assert abs(bc["bcnogeo1"]) < 1e-12 and abs(bc["bcnogeo2"]) < 1e-14 * scale
    assert abs(res["el2"]) < 1e-14 * scale
    assert abs(res["el3"] + bc["dPdot_ds"]) < 1e-12
    assert abs(res["el4"] - bc["bcnogeo3"] / 2) < 1e-13 * scale


finite = dict(allow_nan=False, allow_infinity=False)


@given(
    st.floats(0.2, 3), st.floats(-math.pi, math.pi), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
    st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
)
@settings(max_examples=200)
def test_darboux_and_frenet_expansions_agree(kappa, theta, tau, dk, ddk, dtau, dth, ddth, beta, varpi):
    bp = BoundaryPoint(kappa, theta, tau, dk, ddk, dtau, dth, ddth)
    Lam = Polynomial((0.3, -0.2, 1.0, 0.4))
    a = j_prime_darboux(bp, Lam, beta, varpi)
    b = j_prime_frenet(bp, Lam, beta, varpi)
    scale = 1 + sum(abs(x) for x in a)
    assert abs(a[0] - b[0]) < 1e-11 * scale and abs(a[1] - b[1]) < 1e-11 * scale


def test_darboux_components_of_parallel():
    bp = BoundaryPoint(kappa=2.0, theta=0.3)
    assert math.isclose(bp.kg, 2 * math.sin(0.3)) and math.isclose(bp.kn, 2 * math.cos(0.3))
    assert bp.tg == 0.0 and bp.dkg == 0.0 and bp.dkn == 0.0


def test_g_jet():
    assert G_jet(BoundaryPoint(kappa=1.5, theta=0.0), Quadratic()) == (2.0, 0.0, 0.0)
    g = G_jet(BoundaryPoint(kappa=2.0, theta=0.0), TotalCurvature(3.0))
    assert math.isclose(g[0], 1.5)
    with pytest.raises(SingularG):
        G_jet(BoundaryPoint(kappa=0.0, theta=0.0), Quadratic())


def test_rescaling_vanishes_pointwise_for_willmore():
    prof = sphere_cap_profile(-1.2, 0.9)
    beta = 0.4
    params = _params(PWillmore(1.0, 0.0, 2), 0.0, beta)
    lhs, rhs = rescaling_terms(prof, params)
    assert abs(lhs) < 1e-14
    r = prof.boundary.r
    assert math.isclose(rescaling_defect(prof, params), -2 * math.pi * r * closure(Quadratic(), 1 / r, beta),
                        rel_tol=1e-12)


def test_rescaling_on_critical_planar_disk():
    beta = 2.0
    prof = planar_disk_profile(1 / math.sqrt(beta))
    for p in (2, 3):
        assert abs(rescaling_defect(prof, _params(PWillmore(1.0, 0.0, p), 0.0, beta))) < 1e-10


@pytest.mark.parametrize("p", [2, 3, 4, 5])
def test_rescaling_lhs_on_hemisphere(p):
    lhs, _ = rescaling_terms(hemisphere_profile(), _params(PWillmore(1.0, 0.0, p)))
    assert math.isclose(lhs, 2 * math.pi * (2 - p) * (-1) ** p, abs_tol=1e-9)


def test_flux_examples():
    prof = sphere_cap_profile(-1.1, 1.0)
    c0 = 0.7
    w1 = surface_integral(prof, lambda v: v["H"] - c0)
    assert math.isclose(flux_value(prof, c0, 2), -2 * c0 * w1, rel_tol=1e-10)
    assert flux_value(planar_disk_profile(), 0.0, 1) == 0.0
    assert abs(flux_value(sphere_cap_profile(-2.0, 1.0), 1.0, 3)) < 1e-12


def test_cap_criticality_examples():
    c = cap_criticality(1, 2.0, 1.0, -1.0)
    assert (c.eta, c.H_o, c.feasible) == (0.25, -2.0, True)
    with pytest.raises(InfeasibleCap):
        cap_criticality(1, 1.9, 1.0, -1.0)
    c = cap_criticality(2, 1.0, 1.0, 0.3)
    assert c.c0 == 0.0 and c.c0_forced and c.eta == -1.0 and c.H_o < 0
    c = cap_criticality(3, 3.0, 1.0, 1.0)
    assert c.eta == 27 / 4 and c.H_o == -2.0 and c.sign_checks["eta_sign_ok"]
    assert cap_criticality(4, 3.0, 1.0, 1.0).eta < 0
    with pytest.raises(BranchError):
        cap_criticality(0, 1.0, 1.0, 1.0)
    with pytest.raises(BranchError):
        cap_criticality(2.5, 1.0, 1.0, 1.0)
    c = cap_criticality(3, 1.0, 1.0, 1.0, raise_infeasible=False)
    assert not c.feasible


def test_cmc_classify_examples():
    assert cmc_classify(-1.0, -1.0, 3).branch == "ii"
    b = cmc_classify(-2.0, 1.0, 3)
    assert b.branch == "i" and math.isclose(b.K, 4.0)
    assert cmc_classify(0.5, 0.5, 1).branch == "not_critical"


def test_report_json_shape():
    prof = sphere_cap_profile(-2.0, math.pi / 4)
    rep = evaluate_criticality(prof, _params(PWillmore(1.0, 1.0, 3), 27 / 4, 9.0), "cap", tol=1e-10)
    d = rep.to_json_dict()
    assert set(d["residuals"]) == {"el1_max", "el2", "el3", "el4"}
    assert set(d["params"]) == {"eta", "beta", "sigma", "c0", "p", "varpi"}
    for key in ("regime", "rescaling_defect", "flux_value", "orientation_branch"):
        assert key in d
    schema = json.loads(resources.files("critical_disks").joinpath("schemas", "report.schema.json").read_text())
    jsonschema.validate(json.loads(json.dumps(d)), {**schema["$defs"]["criticality"], "$defs": schema["$defs"]})

import math

import numpy as np
import pytest
from scipy.integrate import RK45

from critical_disks.errors import QuadratureError
from critical_disks.quadrature import gauss_legendre, integrate
from critical_disks.rk import dopri5


def test_gauss_legendre_exact_for_degree_15():
    f = lambda x: x**15 - 3 * x**7 + 1  # noqa: E731
    val = gauss_legendre(f, np.array([0.0]), np.array([2.0]))[0]
    assert math.isclose(val, 2**16 / 16 - 3 * 2**8 / 8 + 2, rel_tol=1e-14)


def test_adaptive_integration():
    assert abs(integrate(np.sin, [0.0, math.pi]) - 2.0) < 1e-12
    val = integrate(lambda x: x**2.5, [0.0, 1.0], tol=1e-12)
    assert abs(val - 1.0 / 3.5) < 1e-12


def test_integration_reports_failure():
    with pytest.raises(QuadratureError):
        integrate(lambda x: 1.0 / (x - 0.5) ** 2, [0.0, 1.0], tol=1e-12, max_depth=6)


def test_dopri5_harmonic_oscillator():
    res = dopri5(lambda t, y: np.array([y[1], -y[0]]), 0.0, [1.0, 0.0], 10.0, rtol=1e-12, atol=1e-12)
    assert res.status == "t_end"
    assert np.allclose(res.y[-1], [math.cos(10), -math.sin(10)], atol=1e-10)
    t = np.linspace(0, 10, 101)
    assert np.allclose(res.dense(t)[:, 0], np.cos(t), atol=1e-9)


def test_dopri5_matches_scipy_rk45():
    fun = lambda t, y: np.array([y[1], (1 - y[0] ** 2) * y[1] - y[0]])  # noqa: E731
    ours = dopri5(fun, 0.0, [2.0, 0.0], 5.0, rtol=1e-11, atol=1e-11)
    ref = RK45(fun, 0.0, [2.0, 0.0], 5.0, rtol=1e-11, atol=1e-11)
    while ref.status == "running":
        ref.step()
    assert np.allclose(ours.y[-1], ref.y, atol=1e-8)


def test_dopri5_veto_shrinks_steps():
    calls = {"n": 0}

    def accept(t, y):
        calls["n"] += 1
        return abs(y[0] - math.exp(t)) < 1e-12 * math.exp(t)

    res = dopri5(lambda t, y: y, 0.0, [1.0], 1.0, rtol=1e-6, atol=1e-6, accept=accept)
    assert res.status == "t_end"
    assert abs(res.y[-1, 0] - math.e) < 1e-11 * math.e


def test_dopri5_on_step_stop():
    res = dopri5(lambda t, y: np.array([1.0]), 0.0, [0.0], 10.0, max_step=0.1,
                 on_step=lambda seg, y: "done" if y[0] > 1 else None)
    assert res.status == "done"
    assert 1.0 < res.t[-1] <= 1.1 + 1e-12

"""Composite Gauss-Legendre quadrature with a step-halving error estimate."""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

GL_ORDER = 8
_X, _W = np.polynomial.legendre.leggauss(GL_ORDER)


def gauss_legendre(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Fixed-order rule on each interval ``[a_i, b_i]`` (vectorised)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * _X[None, :]).ravel()
    vals = np.asarray(f(nodes), dtype=float).reshape(a.size, GL_ORDER)
    return half * (vals @ _W)


def integrate(f, breakpoints, tol: float = 1e-9, max_depth: int = 20) -> float:
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Each panel is compared with its two halves; panels whose difference
    exceeds their share of ``tol`` are split. The returned value is the
    refined (halved) sum.
    """
    pts = np.unique(np.asarray(breakpoints, dtype=float))
    if pts.size < 2:
        return 0.0
    total_len = pts[-1] - pts[0]
    a, b = pts[:-1], pts[1:]
    coarse = gauss_legendre(f, a, b)
    result = 0.0
    err_total = 0.0
    for _ in range(max_depth):
        m = 0.5 * (a + b)
        left = gauss_legendre(f, a, m)
        right = gauss_legendre(f, m, b)
        fine = left + right
        err = np.abs(fine - coarse)
        # the second clause is the round-off floor
        ok = (err <= tol * (b - a) / total_len) | (err <= 64 * np.finfo(float).eps * np.abs(fine))
        result += fine[ok].sum()
        err_total += err[ok].sum()
        if ok.all():
            return float(result)
        bad = ~ok
        a, b = np.concatenate([a[bad], m[bad]]), np.concatenate([m[bad], b[bad]])
        coarse = np.concatenate([left[bad], right[bad]])
    raise QuadratureError(f"quadrature estimate above tolerance {tol:g} after refinement")

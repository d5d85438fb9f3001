"""Minkowski gauge of a dynamics set and the dual sets built from its support function."""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import UnsupportedError
from .geometry import (
    Ball, HPolyhedron, MEMBER_TOL, as_vector, as_hpolyhedron,
    polar_norm, require_dynamics,
)
from .lp import LinearProgram, solve_lp

_ZERO = 1e-13


@dataclass(frozen=True)
class GaugeValue:
    """Gauge value with a certificate.

    ``witness`` is the tuple of maximizing row indices (H-form), the
    ``(lam, mu)`` weights of the scaled combination (V-form) or the boundary
    point ``x / value`` (ball). ``horizon`` marks a nonzero ``x`` whose gauge
    is 0 because it lies in the horizon cone (the infimum is not attained).
    """

    value: float
    witness: Optional[Any] = None
    horizon: bool = False

    def __float__(self):
        return self.value


def _ball_radius(F):
    if np.any(F.center != 0):
        raise UnsupportedError("gauge formulas need a ball centred at the origin")
    return F.radius


def gauge(F, x):
    """``rho_F(x) = inf{t > 0 : x in tF}``."""
    require_dynamics(F)
    x = as_vector(x, F.n)
    if not np.any(x):
        return GaugeValue(0.0)
    if isinstance(F, HPolyhedron):
        ratios = (F.A @ x) / F.b
        top = float(ratios.max())
        if top <= 0.0:
            return GaugeValue(0.0, None, horizon=True)
        active = tuple(np.flatnonzero(ratios >= top - 1e-12 * max(1.0, top)).tolist())
        return GaugeValue(top, active)
    if isinstance(F, Ball):
        val = float(np.linalg.norm(x)) / _ball_radius(F)
        return GaugeValue(val, x / val) if val > 0.0 else GaugeValue(0.0)
    return _vpoly_gauge(F, x)


def _vpoly_gauge(F, x):
    nv, nr = F.vertices.shape[0], F.rays.shape[0]
    G = np.vstack([F.vertices, F.rays]).T
    c = np.concatenate([np.ones(nv), np.zeros(nr)])
    sol = solve_lp(LinearProgram(c, A_eq=G, b_eq=x, lower=np.zeros(nv + nr)))
    if not sol.optimal:
        raise ArithmeticError(f"gauge LP ended with status {sol.status}")
    lam, mu = sol.x[:nv], sol.x[nv:]
    if sol.value <= _ZERO:
        return GaugeValue(0.0, (lam, mu), horizon=True)
    return GaugeValue(float(sol.value), (lam, mu))


def gauge_batch(F, X):
    """Gauge of every row of ``X`` (closed forms; V-form goes through its H-form)."""
    require_dynamics(F)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(F, Ball):
        return np.linalg.norm(X, axis=1) / _ball_radius(F)
    H = as_hpolyhedron(F)
    return np.maximum(0.0, np.max((X @ H.A.T) / H.b, axis=1))


def gauge_subdiff_contains(F, x, v, tol=MEMBER_TOL):
    """``v in d rho_F(x)``: ``sigma_F(v) <= 1`` and ``<v, x> >= rho_F(x)``."""
    require_dynamics(F)
    x = as_vector(x, F.n)
    v = as_vector(v, F.n)
    return bool(F.support(v) <= 1.0 + tol and v @ x >= gauge(F, x).value - tol)


def cstar_contains(F, v, tol=MEMBER_TOL):
    """``sigma_F(-v) <= 1``."""
    require_dynamics(F)
    return bool(F.support(-as_vector(v, F.n)) <= 1.0 + tol)


def sstar_contains(F, v, tol=MEMBER_TOL):
    """``sigma_F(-v) == 1`` up to ``tol``."""
    require_dynamics(F)
    s = F.support(-as_vector(v, F.n))
    return bool(np.isfinite(s) and abs(s - 1.0) <= tol)


def gauge_continuity_modulus(F):
    """Lipschitz constant ``||F°||`` of the gauge."""
    return polar_norm(F)

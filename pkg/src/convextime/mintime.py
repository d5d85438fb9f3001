"""Minimal time function T(x) = inf{t > 0 : (x + tF) meets Omega} and its subdifferential.

Polyhedral data go through one linear program in ``(w, t)``; a ball dynamics
set reduces to the Euclidean distance; a ball target with polyhedral dynamics
is handled by bisection on ``t``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnattainedError, UnsupportedError, ValidationError
from .gauge import cstar_contains, gauge, gauge_subdiff_contains, sstar_contains
from .geometry import (
    Ball, ConvexSet, HPolyhedron, MAX_CONVERT_DIM, MEMBER_TOL, VPolytope,
    as_hpolyhedron, as_vector, h_to_v, horizon_cone, normal_cone_contains,
    require_dynamics, _dedupe_rows, _polish_vertex,
)
from .lp import LinearProgram, project_qp, solve_lp

ZERO_TIME = 1e-12
_BISECT_STEPS = 200
_FACE_SLACK = 1e-9

IN_TARGET = "in_target"
IN_F_CLOSURE = "in_f_closure"
OUTSIDE = "outside"


@dataclass(frozen=True)
class MinTimeResult:
    """``value`` with a target witness ``w`` and dynamics witness ``f`` (``x + value*f = w``).

    ``attained`` is False when ``value == 0`` but ``x`` is not in the target;
    ``f`` is then ``None`` and ``w`` (if present) satisfies ``rho_F(w - x) = 0``.
    """

    value: float
    w: Optional[np.ndarray]
    f: Optional[np.ndarray]
    attained: bool


@dataclass(frozen=True)
class ExpansionHandle:
    """The sublevel set ``{x : T(x) <= r}``, kept implicit."""

    omega: ConvexSet
    F: ConvexSet
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValidationError("expansion radius must be positive")


@dataclass(frozen=True)
class SubdiffVerdict:
    verdict: bool
    case: str

    def __bool__(self):
        return self.verdict


def _check_pair(F, omega, x):
    require_dynamics(F)
    if F.n != omega.n:
        raise ValidationError(f"dynamics in R^{F.n} but target in R^{omega.n}")
    return as_vector(x, F.n)


def _finish(x, t, w):
    if t <= ZERO_TIME:
        return MinTimeResult(0.0, w, None, attained=False)
    return MinTimeResult(float(t), w, (w - x) / t, attained=True)


def eval_mintime(F, omega, x):
    """Evaluate ``T_omega^F(x)`` with witnesses."""
    x = _check_pair(F, omega, x)
    if omega.contains(x, 0.0):
        return MinTimeResult(0.0, x.copy(), np.zeros_like(x), attained=True)
    if isinstance(F, Ball):
        if np.any(F.center != 0):
            raise UnsupportedError("ball dynamics must be centred at the origin")
        w = omega.project(x)
        return _finish(x, np.linalg.norm(w - x) / F.radius, w)
    if isinstance(omega, Ball):
        return _bisect_ball_target(F, omega, x)
    return _polyhedral_lp(F, omega, x)


def mintime(F, omega, x):
    """Scalar shortcut for ``eval_mintime(...).value``."""
    return eval_mintime(F, omega, x).value


def _polyhedral_lp(F, omega, x):
    n = x.size
    # variables: w (free) | t >= 0 | dynamics weights >= 0 | target weights >= 0
    blocks_ub, rhs_ub, blocks_eq, rhs_eq = [], [], [], []
    if isinstance(F, HPolyhedron):
        nf = 0
    else:
        nf = F.vertices.shape[0] + F.rays.shape[0]
    if isinstance(omega, HPolyhedron):
        no = 0
    else:
        no = omega.vertices.shape[0] + omega.rays.shape[0]
    nvar = n + 1 + nf + no
    c = np.zeros(nvar)
    c[n] = 1.0
    lower = np.concatenate([np.full(n, -np.inf), np.zeros(1 + nf + no)])

    if isinstance(F, HPolyhedron):
        # A_F (w - x) <= t b_F
        M = np.zeros((F.m, nvar))
        M[:, :n] = F.A
        M[:, n] = -F.b
        blocks_ub.append(M)
        rhs_ub.append(F.A @ x)
    else:
        # w - x = sum a_j v_j + sum b_k r_k with sum a_j = t
        G = np.vstack([F.vertices, F.rays]).T
        M = np.zeros((n, nvar))
        M[:, :n] = np.eye(n)
        M[:, n + 1:n + 1 + nf] = -G
        blocks_eq.append(M)
        rhs_eq.append(x)
        row = np.zeros((1, nvar))
        row[0, n] = -1.0
        row[0, n + 1:n + 1 + F.vertices.shape[0]] = 1.0
        blocks_eq.append(row)
        rhs_eq.append(np.zeros(1))

    if isinstance(omega, HPolyhedron):
        M = np.zeros((omega.m, nvar))
        M[:, :n] = omega.A
        blocks_ub.append(M)
        rhs_ub.append(omega.b)
    else:
        G = np.vstack([omega.vertices, omega.rays]).T
        off = n + 1 + nf
        M = np.zeros((n, nvar))
        M[:, :n] = np.eye(n)
        M[:, off:] = -G
        blocks_eq.append(M)
        rhs_eq.append(np.zeros(n))
        row = np.zeros((1, nvar))
        row[0, off:off + omega.vertices.shape[0]] = 1.0
        blocks_eq.append(row)
        rhs_eq.append(np.ones(1))

    def stack(blocks, rhs):
        if not blocks:
            return None, None
        return np.vstack(blocks), np.concatenate(rhs)

    A_ub, b_ub = stack(blocks_ub, rhs_ub)
    A_eq, b_eq = stack(blocks_eq, rhs_eq)
    sol = solve_lp(LinearProgram(c, A_ub, b_ub, A_eq, b_eq, lower))
    if not sol.optimal:
        raise ArithmeticError(f"minimal time LP ended with status {sol.status}")
    return _finish(x, max(0.0, sol.x[n]), sol.x[:n].copy())


def _scaled_dynamics_projection(F, t, y):
    """Euclidean projection of ``y`` onto ``tF`` (``t >= 0``; ``0F`` means the horizon cone)."""
    if isinstance(F, HPolyhedron):
        return project_qp(HPolyhedron(F.A, t * F.b), y)
    V = F.vertices * t if t > 0 else np.zeros((1, F.n))
    return project_qp(VPolytope(V, F.rays), y)


def _bisect_ball_target(F, omega, x):
    c, R = omega.center, omega.radius
    y = c - x

    def gap(t):
        p = _scaled_dynamics_projection(F, t, y)
        return np.linalg.norm(y - p) - R, p

    g0, p = gap(0.0)
    if g0 <= 0:
        return _finish(x, 0.0, _nearest_in_ball(c, R, x + p))
    lo, hi = 0.0, 1.0
    while gap(hi)[0] > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 2.0 ** 60:
            raise ArithmeticError("bisection bracket for the ball target diverged")
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if gap(mid)[0] > 0:
            lo = mid
        else:
            hi = mid
    _, p = gap(hi)
    # the nearest point of x + hi*F to the centre touches the ball from outside
    return _finish(x, hi, _nearest_in_ball(c, R, x + p))


def _nearest_in_ball(c, R, z):
    g = z - c
    ng = np.linalg.norm(g)
    return z.copy() if ng <= R else c + R * g / ng


def in_f_closure(F, omega, x, tol=MEMBER_TOL):
    """Whether ``x`` lies in the F-closure of ``omega`` (zero level of ``T``)."""
    return eval_mintime(F, omega, x).value <= tol


def f_closure_explicit(F, omega):
    """``omega - F_inf`` for a compact polyhedral ``omega``, as a ``VPolytope``."""
    require_dynamics(F)
    if isinstance(omega, Ball):
        if F.is_bounded:
            return omega
        raise UnsupportedError("F-closure of a ball under unbounded dynamics is not polyhedral")
    if isinstance(omega, HPolyhedron):
        omega = omega.vrep
    if not omega.is_bounded:
        raise ValidationError("F-closure is only formed for a bounded target")
    rays = horizon_cone(F).generators
    return VPolytope(omega.vertices, -rays)


def generalized_projection(F, omega, x):
    """All minimizers of ``rho_F(w - x)`` over a bounded ``omega``.

    Polyhedral data return every vertex of the optimal face; a ball on either
    side makes the minimizer unique.
    """
    x = _check_pair(F, omega, x)
    if not omega.is_bounded:
        raise ValidationError("generalized projection needs a bounded target")
    res = eval_mintime(F, omega, x)
    if not res.attained:
        raise UnattainedError("no minimizer: T(x) = 0 but x is not in the target")
    if res.value == 0.0 or isinstance(F, Ball) or isinstance(omega, Ball):
        return [res.w]
    if F.n > MAX_CONVERT_DIM:
        return [res.w]
    HF = as_hpolyhedron(F)
    HO = as_hpolyhedron(omega)
    t = res.value
    A = np.vstack([HO.A, HF.A])
    b = np.concatenate([HO.b, HF.A @ x + t * HF.b])
    slack = _FACE_SLACK * max(1.0, t)
    V, _ = h_to_v(A, b + slack)
    # the slack keeps thin faces nonempty; snap vertices back onto the exact system
    V = np.array([_polish_vertex(A, b, v, 10 * slack) for v in V])
    keep = [v for v in V if gauge(F, v - x).value <= t + 1e-7 and omega.contains(v)]
    if not keep:
        return [res.w]
    return list(_dedupe_rows(np.array(keep), 1e-7))


def expansion_support(h, v):
    """``sigma_omega(v) + r * sigma_F(-v)`` (``+inf`` absorbs)."""
    v = as_vector(v, h.omega.n)
    if not np.any(v):
        return 0.0
    s = h.omega.support(v)
    if not np.isfinite(s):
        return np.inf
    sf = h.F.support(-v)
    if not np.isfinite(sf):
        return np.inf
    return float(s + h.r * sf)


def closure_support(F, omega, v):
    """Support function of the F-closure: ``sigma_omega(v)`` if ``-v`` is polar to ``F_inf``."""
    v = as_vector(v, omega.n)
    if isinstance(F, Ball):
        return omega.support(v)
    if F.n <= MAX_CONVERT_DIM:
        if not np.isfinite(horizon_cone(F).support(-v)):
            return np.inf
    elif not np.isfinite(F.support(-v)):
        return np.inf
    return omega.support(v)


def classify(F, omega, xbar, tol=MEMBER_TOL):
    """``(case, T(xbar))`` with the case tag used by the subdifferential tests."""
    xbar = _check_pair(F, omega, xbar)
    if omega.contains(xbar, tol):
        return IN_TARGET, 0.0
    t = eval_mintime(F, omega, xbar).value
    return (IN_F_CLOSURE if t <= tol else OUTSIDE), t


def mintime_subdiff_contains(F, omega, xbar, v, tol=MEMBER_TOL):
    """Whether ``v`` is a subgradient of ``T`` at ``xbar``; returns a ``SubdiffVerdict``."""
    xbar = _check_pair(F, omega, xbar)
    v = as_vector(v, F.n)
    case, t = classify(F, omega, xbar, tol)
    if case == IN_TARGET:
        ok = normal_cone_contains(omega, xbar, v, tol) and cstar_contains(F, v, tol)
    elif case == IN_F_CLOSURE:
        ok = closure_support(F, omega, v) <= v @ xbar + tol and cstar_contains(F, v, tol)
    else:
        h = ExpansionHandle(omega, F, t)
        ok = expansion_support(h, v) <= v @ xbar + tol and sstar_contains(F, v, tol)
    return SubdiffVerdict(bool(ok), case)


def mintime_subdiff_via_projection(F, omega, xbar, v, tol=MEMBER_TOL):
    """Subgradient test through a generalized projection ``w`` of ``xbar``."""
    xbar = _check_pair(F, omega, xbar)
    v = as_vector(v, F.n)
    if eval_mintime(F, omega, xbar).value <= tol:
        raise ValidationError("projection formula needs T(xbar) > 0")
    w = generalized_projection(F, omega, xbar)[0]
    return bool(gauge_subdiff_contains(F, w - xbar, -v, tol)
                and normal_cone_contains(omega, w, v, tol))


def shift_inequality_check(F, omega, x, f, t, tol=MEMBER_TOL):
    """Check ``T(x - t f) <= T(x) + t`` for ``f`` in ``F`` and ``t >= 0``."""
    x = _check_pair(F, omega, x)
    f = as_vector(f, F.n)
    if t < 0:
        raise ValidationError("shift length must be nonnegative")
    if not F.contains(f, tol):
        raise ValidationError("shift direction must lie in F")
    return mintime(F, omega, x - t * f) <= mintime(F, omega, x) + t + tol

"""Signed minimal time, the auxiliary function mu, and the signed distance subdifferential.

Targets are H-polyhedra. Inside the target the time to leave is the smallest
facet slack measured in the dynamics' support, ``(b_i - a_i.x) / sigma_F(a_i)``.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable

import numpy as np

from .errors import UnsupportedError, ValidationError
from .gauge import gauge_batch
from .geometry import (
    Ball, HPolyhedron, MAX_CONVERT_DIM, MEMBER_TOL, PolyhedralCone,
    as_hpolyhedron, as_vector, bounding_box, combination_residual, is_symmetric,
    normal_cone_contains, require_dynamics, _dedupe_rows,
)
from .lp import UNBOUNDED, LinearProgram, solve_lp
from .mintime import eval_mintime
from .oracle import SampleSpec, infconv_sample

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"

BOUNDARY_TOL = 1e-7
TIE_TOL = 1e-9
SEPARATION_TOL = 1e-6
_SEPARATION_RANDOM = 1000
_SEPARATION_SEED = 0x5EED
_UNIT_BALL_CACHE = {}
_ROUNDOFF = 1e-12


@dataclass(frozen=True)
class SignedValue:
    value: float
    region: str
    witness: Any = None


def _unit_ball(n):
    if n not in _UNIT_BALL_CACHE:
        _UNIT_BALL_CACHE[n] = Ball(np.zeros(n), 1.0)
    return _UNIT_BALL_CACHE[n]


def _target(omega):
    if isinstance(omega, Ball):
        raise UnsupportedError("signed routines need a polyhedral target")
    H = as_hpolyhedron(omega)
    if H.m == 0:
        raise ValidationError("target is all of R^n; its complement is empty")
    return H


def _check(F, omega, x=None):
    require_dynamics(F)
    if not F.is_bounded:
        raise ValidationError("signed routines need bounded dynamics")
    H = _target(omega)
    if F.n != H.n:
        raise ValidationError(f"dynamics in R^{F.n} but target in R^{H.n}")
    return H if x is None else (H, as_vector(x, H.n))


def facet_speeds(F, omega):
    """``sigma_F(a_i)`` for every facet row of ``omega``."""
    H = _check(F, omega)
    return np.array([F.support(a) for a in H.A])


def eval_mu(F, omega, x):
    """``mu(x) = -T_{complement}(x)`` on the target and ``+inf`` off it."""
    H, x = _check(F, omega, x)
    if not H.contains(x, 0.0):
        return np.inf
    slack = (H.b - H.A @ x) / facet_speeds(F, H)
    return 0.0 - float(np.min(np.maximum(0.0, slack)))


def mu_batch(F, omega):
    """Vectorized ``mu`` on the rows of an array (the infimal-convolution sampler uses this)."""
    H = _check(F, omega)
    speeds = facet_speeds(F, H)

    def mu(Y):
        Y = np.atleast_2d(Y)
        R = H.b - Y @ H.A.T
        out = -np.min(np.maximum(0.0, R / speeds), axis=1)
        out[np.any(R < -_ROUNDOFF * np.maximum(1.0, np.abs(H.b)), axis=1)] = np.inf
        return out

    return mu


def _region(value):
    if value < -BOUNDARY_TOL:
        return INTERIOR
    if value > BOUNDARY_TOL:
        return EXTERIOR
    return BOUNDARY


def eval_signed_mintime(F, omega, x):
    """Signed minimal time: ``T_omega(x)`` outside, ``-T_{complement}(x)`` inside."""
    H, x = _check(F, omega, x)
    if H.contains(x, 0.0):
        speeds = facet_speeds(F, H)
        slack = np.maximum(0.0, (H.b - H.A @ x) / speeds)
        i = int(np.argmin(slack))
        _, f = F.support_point(H.A[i])
        value = -float(slack[i])
        witness = x + slack[i] * f
    else:
        res = eval_mintime(F, H, x)
        value, witness = res.value, res.w
    region = _region(value)
    if region == BOUNDARY:
        value = 0.0
    return SignedValue(value, region, witness)


def classify_region(F, omega, x, tol=BOUNDARY_TOL):
    value = eval_signed_mintime(F, omega, x).value
    if value < -tol:
        return INTERIOR
    if value > tol:
        return EXTERIOR
    return BOUNDARY


def complement_mintime(F, omega, x):
    """``T`` to the closed complement, as the minimum over the reversed facet half-spaces."""
    H, x = _check(F, omega, x)
    return min(eval_mintime(F, HPolyhedron(-a[None, :], [-b]), x).value
               for a, b in zip(H.A, H.b))


def default_infconv_spec(omega, n, samples=10**4, seed=0x5EED):
    lo, hi = bounding_box(omega)
    res = max(3, int(np.ceil(samples ** (1.0 / n))))
    return SampleSpec(lo, hi, res=res, seed=seed)


def infconv_eval(F, omega, x, spec=None):
    """Sampled ``inf_y mu(y) + rho_F(x - y)``.

    Off the target the identity with the signed minimal time needs ``F = -F``;
    a non-symmetric ``F`` is rejected there.
    """
    H, x = _check(F, omega, x)
    if not H.contains(x, 0.0) and not is_symmetric(F):
        raise UnsupportedError("infimal convolution off the target needs symmetric dynamics")
    if spec is None:
        spec = default_infconv_spec(H, H.n)
    return infconv_sample(mu_batch(F, H), lambda Y: gauge_batch(F, Y), x, spec)


# ---------------------------------------------------------------------------
# subdifferentials at boundary points

def _boundary_samples(H, xbar, rng, n_random=400):
    pts = [xbar]
    n = H.n
    # feet of xbar on every facet hyperplane, and points pushed inward from xbar
    for a, b in zip(H.A, H.b):
        pts.append(xbar + (b - a @ xbar) / (a @ a) * a)
        for h in (1e-3, 1e-2, 1e-1, 0.5, 1.0):
            pts.append(xbar - h * a / np.linalg.norm(a))
    dirs = rng.standard_normal((64, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    for h in (1e-3, 1e-2, 1e-1, 1.0):
        pts.extend(xbar + h * dirs)
    if n <= MAX_CONVERT_DIM:
        V = H.vrep
        pts.extend(V.vertices)
        if V.is_bounded:
            lo, hi = V.vertices.min(axis=0), V.vertices.max(axis=0)
        else:
            lo, hi = xbar - 2.0, xbar + 2.0
        pts.extend(lo + (hi - lo) * rng.random((n_random, n)))
    P = np.array(pts)
    return P[np.all(P @ H.A.T <= H.b + 1e-12, axis=1)]


def mu_subdiff_contains(F, omega, xbar, v, tol=MEMBER_TOL, seed=0x5EED):
    """Subgradient inequality for ``mu`` at a boundary point over a structured sample.

    Acceptance means no sampled point violates the inequality; it is a
    necessary condition at the sampler's resolution.
    """
    H, xbar = _check(F, omega, xbar)
    v = as_vector(v, H.n)
    if not is_symmetric(F):
        raise ValidationError("boundary subdifferential relations assume symmetric dynamics")
    mu0 = eval_mu(F, H, H.project(xbar))
    if not H.contains(xbar, tol) or mu0 < -tol:
        raise ValidationError("xbar must lie on the boundary of the target")
    mu = mu_batch(F, H)
    P = _boundary_samples(H, xbar, np.random.default_rng(seed))
    D = P - xbar
    rhs = mu(P) - mu0
    viol = (D @ v - rhs) / np.maximum(1.0, np.linalg.norm(D, axis=1))
    return bool(np.max(viol) <= tol)


def mu_subdiff_exact(F, omega, xbar, v, tol=MEMBER_TOL):
    """Closed-form ``v in d mu(xbar)`` for an H-polyhedral target.

    On the target ``mu`` is the maximum of the affine maps ``(a_i.x - b_i)/sigma_F(a_i)``,
    so at a boundary point ``d mu = {sum l_i a_i : l >= 0, sum l_i sigma_F(a_i) >= 1}``
    over the active rows. Used as an independent check of the sampled test.
    """
    H, xbar = _check(F, omega, xbar)
    v = as_vector(v, H.n)
    active = np.flatnonzero(np.abs(H.A @ xbar - H.b) <= tol)
    if active.size == 0:
        raise ValidationError("xbar must lie on the boundary of the target")
    A = H.A[active]
    s = facet_speeds(F, H)[active]
    k = active.size
    # maximize sum l_i s_i subject to A^T l = v within tol, l >= 0
    A_ub = np.vstack([np.hstack([A.T, -np.ones((H.n, 1))]), np.hstack([-A.T, -np.ones((H.n, 1))])])
    b_ub = np.concatenate([v, -v])
    c = np.zeros(k + 1)
    c[-1] = 1.0
    sol = solve_lp(LinearProgram(c, A_ub, b_ub, lower=np.zeros(k + 1)))
    if sol.value > tol:
        return False
    c2 = np.concatenate([-s, [0.0]])
    A_ub2 = np.vstack([A_ub, np.r_[np.zeros(k), 1.0][None, :]])
    b_ub2 = np.concatenate([b_ub, [tol]])
    sol2 = solve_lp(LinearProgram(c2, A_ub2, b_ub2, lower=np.zeros(k + 1)))
    return bool(sol2.status == UNBOUNDED or -sol2.value >= 1.0 - tol)


def delta_subdiff_contains(F, omega, xbar, v, tol=MEMBER_TOL, seed=0x5EED):
    """``v in d mu(xbar)`` and ``v in F°``."""
    v = as_vector(v, F.n)
    return bool(mu_subdiff_contains(F, omega, xbar, v, tol, seed) and F.support(v) <= 1.0 + tol)


# ---------------------------------------------------------------------------
# signed distance

def signed_distance(omega, x):
    """Euclidean signed distance (negative inside)."""
    H = _target(omega)
    return eval_signed_mintime(_unit_ball(H.n), H, x)


def q_set(omega, x):
    """Nearest points of the target (outside) or of the closed complement (inside)."""
    H = _target(omega)
    x = as_vector(x, H.n)
    sv = signed_distance(H, x)
    if sv.region == BOUNDARY:
        raise ValidationError("Q is not formed at boundary points")
    if sv.region == EXTERIOR:
        return [H.project(x)]
    norms = np.linalg.norm(H.A, axis=1)
    dist = (H.b - H.A @ x) / norms
    ties = np.flatnonzero(dist <= dist.min() + TIE_TOL)
    feet = [x + (H.b[i] - H.A[i] @ x) / norms[i] ** 2 * H.A[i] for i in ties]
    return list(_dedupe_rows(np.array(feet), TIE_TOL))


def reverse_normal_check(omega, xbar, wbar, tol=MEMBER_TOL):
    """``wbar - xbar`` is normal to the target at the foot point ``wbar``."""
    H = _target(omega)
    xbar = as_vector(xbar, H.n)
    wbar = as_vector(wbar, H.n)
    return normal_cone_contains(H, wbar, wbar - xbar, tol)


def _cone_generators(N):
    G = N.generators
    if G.shape[0] == 0:
        raise ValidationError("the zero cone meets the unit sphere nowhere")
    return G


def _sphere_candidates(G, d):
    n = G.shape[1]
    cands = [g for g in G]
    for k in range(2, min(G.shape[0], n) + 1):
        for idx in combinations(range(G.shape[0]), k):
            B = G[list(idx)]
            Q, R = np.linalg.qr(B.T)
            if np.min(np.abs(np.diag(R))) <= 1e-12:
                continue
            p = Q @ (Q.T @ d)
            npn = np.linalg.norm(p)
            if npn > 1e-12:
                cands.append(p / npn)
    return cands


def cone_sphere_support(N, d, return_point=False):
    """``max <d, u>`` over unit vectors ``u`` in the cone ``N``.

    Every face of ``N`` is spanned by some subset of its generators; the
    maximizer on the relative interior of a face is the normalized projection
    of ``d`` onto its span, so the candidates are those projections that land
    in ``N`` plus the unit generators.
    """
    if N.n > MAX_CONVERT_DIM:
        raise UnsupportedError(f"sphere-cone support only for n <= {MAX_CONVERT_DIM}")
    d = as_vector(d, N.n)
    G = _cone_generators(N)
    cone = PolyhedralCone(N.n, rays=G)
    best, arg = -np.inf, None
    for u in _sphere_candidates(G, d):
        if cone.contains(u, 1e-9):
            val = float(u @ d)
            if val > best:
                best, arg = val, u
    return (best, arg) if return_point else best


SINGLETON = "singleton"
POLYTOPE = "polytope"
CONE_SPHERE_HULL = "cone_sphere_hull"


@dataclass(frozen=True)
class SubdiffDescription:
    """Exact description of the signed distance subdifferential at a point.

    ``payload`` is the point (singleton), the vertex array (polytope) or the
    normal cone (cone-sphere hull).
    """

    kind: str
    payload: Any
    _support: Callable = field(repr=False, compare=False, default=None)
    _member: Callable = field(repr=False, compare=False, default=None)

    def support(self, d):
        return self._support(as_vector(d))

    def membership(self, v, tol=SEPARATION_TOL):
        return bool(self._member(as_vector(v), tol))

    def to_json(self):
        if self.kind == SINGLETON:
            body = {"point": self.payload.tolist()}
        elif self.kind == POLYTOPE:
            body = {"vertices": self.payload.tolist()}
        else:
            body = {"generators": self.payload.generators.tolist()}
        return {"kind": self.kind, **body}


def _singleton(p):
    return SubdiffDescription(
        SINGLETON, p,
        lambda d: float(p @ d),
        lambda v, tol: np.max(np.abs(v - p)) <= tol)


def _polytope(V):
    empty = np.zeros((0, V.shape[1]))
    return SubdiffDescription(
        POLYTOPE, V,
        lambda d: float(np.max(V @ d)),
        lambda v, tol: combination_residual(V, empty, v) <= tol)


def _cone_sphere_hull(N):
    G = _cone_generators(N)
    n = N.n
    cone = PolyhedralCone(n, rays=G)

    def support(d):
        return cone_sphere_support(cone, d)

    def member(v, tol):
        if not cone.contains(v, tol) or np.linalg.norm(v) > 1.0 + tol:
            return False
        if G.shape[0] == 1:
            return np.max(np.abs(v - G[0])) <= tol
        if n == 2:
            u1, u2 = _arc_ends(G)
            s = u1 + u2
            if np.linalg.norm(s) > 1e-12:
                # chord test: the arc hull is the cone piece of the unit disc beyond the chord u1-u2
                m = s / np.linalg.norm(s)
                return v @ m >= u1 @ m - tol
        return _separation_member(cone, G, v, tol)

    return SubdiffDescription(CONE_SPHERE_HULL, cone, support, member)


def _arc_ends(G):
    ang = np.arctan2(G[:, 1], G[:, 0])
    ref = np.arctan2(*G.sum(axis=0)[::-1]) if np.linalg.norm(G.sum(axis=0)) > 1e-12 else ang[0]
    rel = (ang - ref + np.pi) % (2 * np.pi) - np.pi
    return G[int(np.argmin(rel))], G[int(np.argmax(rel))]


def _separation_member(cone, G, v, tol):
    n = G.shape[1]
    dirs = [g for g in G] + [-g for g in G]
    nv = np.linalg.norm(v)
    if nv > 0:
        dirs.append(v / nv)
    # normals of affine hulls of n generators, pointing at the origin
    for idx in combinations(range(G.shape[0]), n):
        B = G[list(idx)]
        D = B[1:] - B[0]
        _, s, Vt = np.linalg.svd(D) if D.size else (None, np.zeros(0), np.eye(n))
        if D.size and np.sum(s > 1e-10) < n - 1:
            continue
        m = Vt[-1]
        if m @ B[0] > 0:
            m = -m
        dirs.append(m)
    rng = np.random.default_rng(_SEPARATION_SEED)
    R = rng.standard_normal((_SEPARATION_RANDOM, n))
    dirs.extend(R / np.linalg.norm(R, axis=1, keepdims=True))
    return all(v @ d <= cone_sphere_support(cone, d) + tol for d in dirs)


def signed_distance_subdiff(omega, xbar):
    """Describe the subdifferential of the signed distance at ``xbar``."""
    H = _target(omega)
    xbar = as_vector(xbar, H.n)
    sv = signed_distance(H, xbar)
    if sv.region == EXTERIOR:
        p = H.project(xbar)
        return _singleton((xbar - p) / sv.value)
    if sv.region == INTERIOR:
        Q = np.array(q_set(H, xbar))
        return _polytope(_dedupe_rows((xbar - Q) / sv.value) + 0.0)
    if H.n > MAX_CONVERT_DIM:
        raise UnsupportedError(f"boundary case only for n <= {MAX_CONVERT_DIM}")
    active = np.abs(H.A @ xbar - H.b) <= BOUNDARY_TOL * np.maximum(1.0, np.abs(H.b))
    N = PolyhedralCone(H.n, rays=H.A[active])
    return _cone_sphere_hull(N)

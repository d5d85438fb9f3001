"""Convex sets in R^n: H-polyhedra, V-polytopes (with rays) and Euclidean balls.

All sets are immutable after construction. Every operation that needs the
"other" representation of a polyhedron converts it by brute-force extreme-ray
enumeration, which is only offered for ``n <= MAX_CONVERT_DIM``.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
import logging

import numpy as np

from .errors import DimensionError, UnsupportedError, ValidationError
from .lp import LinearProgram, project_generators, project_halfspaces, solve_lp

log = logging.getLogger(__name__)

MEMBER_TOL = 1e-7
MAX_CONVERT_DIM = 4
INTERIOR_PROBE = 1e-6
MIN_OFFSET = 1e-9
_ROW_TOL = 1e-12
_DEDUPE_TOL = 1e-9
_RAY_TOL = 1e-12


def as_vector(x, n=None):
    """Return ``x`` as a float vector, checking its length against ``n``."""
    v = np.asarray(x, dtype=float).ravel()
    if n is not None and v.size != n:
        raise DimensionError(f"expected a vector of length {n}, got {v.size}")
    return v


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _dedupe_rows(M, tol=_DEDUPE_TOL):
    kept = []
    for row in M:
        if not any(np.max(np.abs(row - k)) <= tol for k in kept):
            kept.append(row)
    return np.array(kept).reshape(-1, M.shape[1])


def _normalize_rays(R):
    if R.shape[0] == 0:
        return R
    R = R / np.linalg.norm(R, axis=1, keepdims=True)
    R[np.abs(R) < 1e-14] = 0.0
    return _dedupe_rows(R + 0.0, 1e-9)


class ConvexSet:
    """Common surface of the three set representations."""

    n: int

    def contains(self, x, tol=MEMBER_TOL):
        raise NotImplementedError

    def support_point(self, d):
        """Return ``(sigma_S(d), maximizer)``; the maximizer is ``None`` at +inf."""
        raise NotImplementedError

    def support(self, d):
        return self.support_point(d)[0]

    def project(self, x):
        raise NotImplementedError

    @property
    def is_bounded(self):
        raise NotImplementedError

    def _check(self, x):
        return as_vector(x, self.n)


@dataclass(frozen=True, eq=False)
class HPolyhedron(ConvexSet):
    """``{x : A x <= b}`` with nonzero rows; emptiness is rejected."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape[0] != b.size:
            raise DimensionError(f"A has {A.shape[0]} rows but b has {b.size} entries")
        if A.shape[1] == 0:
            raise DimensionError("zero-dimensional polyhedron")
        if A.shape[0] and np.any(np.linalg.norm(A, axis=1) <= _ROW_TOL):
            raise ValidationError("degenerate (zero) row in A")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "b", _frozen(b))
        if A.shape[0]:
            sol = solve_lp(LinearProgram(np.zeros(A.shape[1]), A, b))
            if sol.status != "optimal":
                raise ValidationError("polyhedron {Ax <= b} is empty")

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    def contains(self, x, tol=MEMBER_TOL):
        x = self._check(x)
        return bool(np.all(self.A @ x <= self.b + tol))

    @cached_property
    def vrep(self):
        """The same set as a ``VPolytope`` (``n <= 4`` only)."""
        V, R = h_to_v(self.A, self.b)
        return VPolytope(V, R)

    def support_point(self, d):
        d = self._check(d)
        if not np.any(d):
            return 0.0, self.vrep.vertices[0] if self.n <= MAX_CONVERT_DIM else None
        if self.n <= MAX_CONVERT_DIM:
            return self.vrep.support_point(d)
        return self.support_lp(d)

    def support_lp(self, d):
        """Support value by the simplex method, bypassing vertex enumeration."""
        d = self._check(d)
        sol = solve_lp(LinearProgram(-d, self.A, self.b))
        if sol.status == "unbounded":
            return np.inf, None
        if sol.status != "optimal":
            raise ArithmeticError(f"support LP ended with status {sol.status}")
        return -sol.value, sol.x

    def project(self, x):
        return project_halfspaces(self.A, self.b, self._check(x))

    @cached_property
    def is_bounded(self):
        if self.n <= MAX_CONVERT_DIM:
            return self.vrep.rays.shape[0] == 0
        eye = np.eye(self.n)
        return all(np.isfinite(self.support_lp(s * e)[0]) for e in eye for s in (1, -1))

    def to_json(self):
        return {"type": "hpoly", "A": self.A.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True, eq=False)
class VPolytope(ConvexSet):
    """``co(vertices) + cone(rays)``; rays are stored unit-normalized."""

    vertices: np.ndarray
    rays: np.ndarray = None

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if V.size == 0:
            raise ValidationError("a V-polytope needs at least one vertex")
        n = V.shape[1]
        R = np.zeros((0, n)) if self.rays is None else np.asarray(self.rays, dtype=float)
        R = R.reshape(-1, n)
        if R.shape[0] and np.any(np.linalg.norm(R, axis=1) <= _ROW_TOL):
            raise ValidationError("zero ray in V-polytope")
        object.__setattr__(self, "vertices", _frozen(_dedupe_rows(V)))
        object.__setattr__(self, "rays", _frozen(_normalize_rays(R)))

    @property
    def n(self):
        return self.vertices.shape[1]

    def contains(self, x, tol=MEMBER_TOL):
        x = self._check(x)
        return combination_residual(self.vertices, self.rays, x) <= tol

    @cached_property
    def hrep(self):
        """The same set as an ``HPolyhedron`` (``n <= 4`` only)."""
        A, b = v_to_h(self.vertices, self.rays)
        return HPolyhedron(A, b)

    def support_point(self, d):
        d = self._check(d)
        if self.rays.shape[0]:
            if np.any(self.rays @ d > _RAY_TOL * max(1.0, np.linalg.norm(d))):
                return np.inf, None
        vals = self.vertices @ d
        k = int(np.argmax(vals))
        return float(vals[k]), self.vertices[k].copy()

    def project(self, x):
        return project_generators(self.vertices, self.rays, self._check(x))

    @property
    def is_bounded(self):
        return self.rays.shape[0] == 0

    @cached_property
    def interior_origin(self):
        # 2n probes +-eps*e_i; their hull holds a ball of radius eps/sqrt(n)
        return all(self.contains(s * INTERIOR_PROBE * e, tol=1e-13)
                   for e in np.eye(self.n) for s in (1.0, -1.0))

    def to_json(self):
        return {"type": "vpoly", "vertices": self.vertices.tolist(), "rays": self.rays.tolist()}


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).ravel()
        if c.size == 0:
            raise DimensionError("zero-dimensional ball")
        r = float(self.radius)
        if not r > 0:
            raise ValidationError("ball radius must be positive")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "radius", r)

    @property
    def n(self):
        return self.center.size

    def contains(self, x, tol=MEMBER_TOL):
        x = self._check(x)
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def support_point(self, d):
        d = self._check(d)
        nd = np.linalg.norm(d)
        if nd == 0:
            return 0.0, self.center.copy()
        return float(self.center @ d + self.radius * nd), self.center + self.radius * d / nd

    def project(self, x):
        x = self._check(x)
        g = x - self.center
        ng = np.linalg.norm(g)
        if ng <= self.radius:
            return x.copy()
        return self.center + self.radius * g / ng

    @property
    def is_bounded(self):
        return True

    def to_json(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """A closed convex cone, either ``{x : A x <= 0}`` or ``cone(rays)``.

    Exactly one of ``A`` and ``rays`` is given. ``cone()`` of no rays is ``{0}``.
    """

    n: int
    A: np.ndarray = None
    rays: np.ndarray = None

    def __post_init__(self):
        if (self.A is None) == (self.rays is None):
            raise ValueError("give exactly one of A (H-form) or rays (generator form)")
        if self.A is not None:
            object.__setattr__(self, "A", _frozen(np.asarray(self.A, dtype=float).reshape(-1, self.n)))
        else:
            R = np.asarray(self.rays, dtype=float).reshape(-1, self.n)
            R = R[np.linalg.norm(R, axis=1) > _ROW_TOL]
            object.__setattr__(self, "rays", _frozen(_normalize_rays(R)))

    def contains(self, d, tol=MEMBER_TOL):
        d = as_vector(d, self.n)
        if self.A is not None:
            return bool(np.all(self.A @ d <= tol))
        if self.rays.shape[0] == 0:
            return bool(np.max(np.abs(d)) <= tol)
        return combination_residual(np.zeros((1, self.n)), self.rays, d) <= tol

    @cached_property
    def generators(self):
        """Unit generators of the cone (lines appear as a pair ``±l``)."""
        if self.rays is not None:
            return self.rays
        if self.n > MAX_CONVERT_DIM:
            raise UnsupportedError(f"cone conversion only for n <= {MAX_CONVERT_DIM}")
        rays, lin = cone_generators(self.A)
        return _normalize_rays(np.vstack([rays, lin, -lin]))

    @property
    def is_zero(self):
        return self.generators.shape[0] == 0

    def support(self, d):
        """``0`` when ``d`` lies in the polar cone, ``+inf`` otherwise."""
        d = as_vector(d, self.n)
        G = self.generators
        if G.shape[0] and np.any(G @ d > _RAY_TOL * max(1.0, np.linalg.norm(d))):
            return np.inf
        return 0.0


def combination_residual(V, R, x):
    """Smallest ``max_i |(V^T lam + R^T mu - x)_i|`` over ``lam`` in the simplex, ``mu >= 0``."""
    nv, n = V.shape
    nr = R.shape[0]
    if nr == 0 and nv == 1:
        return float(np.max(np.abs(V[0] - x)))
    G = np.vstack([V, R]).T  # n x (nv + nr)
    k = nv + nr
    ones = np.ones((n, 1))
    A_ub = np.vstack([np.hstack([G, -ones]), np.hstack([-G, -ones])])
    b_ub = np.concatenate([x, -x])
    A_eq = np.concatenate([np.ones(nv), np.zeros(nr), [0.0]])[None, :]
    c = np.zeros(k + 1)
    c[-1] = 1.0
    sol = solve_lp(LinearProgram(c, A_ub, b_ub, A_eq, [1.0], lower=np.zeros(k + 1)))
    if sol.status != "optimal":
        raise ArithmeticError(f"membership LP ended with status {sol.status}")
    return float(sol.value)


# ---------------------------------------------------------------------------
# representation conversion (extreme-ray enumeration, n <= 4)

def _null_space(M, tol=1e-10):
    if M.shape[0] == 0:
        return np.eye(M.shape[1])
    _, s, Vt = np.linalg.svd(M)
    scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(1.0, scale)))
    return Vt[rank:].T


def cone_generators(G, tol=1e-9):
    """Extreme rays and a lineality basis of ``{y : G y <= 0}``.

    Returns ``(rays, lineality)`` as row arrays. The pointed part is searched
    by enumerating every row subset that pins down a one-dimensional face.
    """
    G = np.asarray(G, dtype=float)
    d = G.shape[1]
    L = _null_space(G)
    lin = L.T
    Q = _null_space(lin) if lin.shape[0] else np.eye(d)
    p = Q.shape[1]
    if p == 0:
        return np.zeros((0, d)), lin
    H = G @ Q
    found = []
    for idx in combinations(range(H.shape[0]), p - 1):
        Z = _null_space(H[list(idx)]) if idx else np.eye(p)
        if Z.shape[1] != 1:
            continue
        z = Z[:, 0]
        for s in (1.0, -1.0):
            y = s * z
            if np.all(H @ y <= tol):
                found.append(Q @ y)
                break
    rays = _normalize_rays(np.array(found).reshape(-1, d))
    return rays, lin


def _require_small(n):
    if n > MAX_CONVERT_DIM:
        raise UnsupportedError(f"H/V conversion is only provided for n <= {MAX_CONVERT_DIM}, got n={n}")


def h_to_v(A, b, tol=1e-9):
    """Vertices and rays of ``{x : A x <= b}``; lines come back as ray pairs."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    _require_small(n)
    G = np.vstack([np.hstack([A, -b[:, None]]), np.r_[np.zeros(n), -1.0][None, :]])
    rays, lin = cone_generators(G, tol)
    verts, dirs = [], []
    for y in rays:
        t = y[-1]
        if t > tol:
            verts.append(y[:n] / t)
        else:
            dirs.append(y[:n])
    for l in lin:
        dirs.extend([l[:n], -l[:n]])
    if not verts:
        raise ValidationError("polyhedron has no vertex after removing its lineality (empty?)")
    verts = [_polish_vertex(A, b, v) for v in verts]
    return _dedupe_rows(np.array(verts)), np.array(dirs).reshape(-1, n)


def _polish_vertex(A, b, v, tol=1e-9):
    """Re-solve the active rows at ``v`` by least squares to shed round-off."""
    act = np.abs(A @ v - b) <= tol * np.maximum(1.0, np.abs(b))
    if np.count_nonzero(act) < A.shape[1]:
        return v
    w = np.linalg.lstsq(A[act], b[act], rcond=None)[0]
    return w if np.max(np.abs(w - v)) <= tol * max(1.0, np.max(np.abs(v))) else v


def v_to_h(V, R, tol=1e-9):
    """An inequality description ``(A, b)`` of ``co(V) + cone(R)``."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    n = V.shape[1]
    R = np.asarray(R, dtype=float).reshape(-1, n)
    _require_small(n)
    G = np.vstack([np.hstack([V, -np.ones((V.shape[0], 1))]),
                   np.hstack([R, np.zeros((R.shape[0], 1))])])
    rays, lin = cone_generators(G, tol)
    rows = [y for y in rays]
    for l in lin:
        rows.extend([l, -l])
    A, b = [], []
    for y in rows:
        a, beta = y[:n], y[n]
        na = np.linalg.norm(a)
        if na <= 1e-10:
            continue
        A.append(a / na)
        b.append(beta / na)
    A = np.array(A).reshape(-1, n)
    b = np.array(b)
    if A.shape[0] == 0:
        raise ValidationError("set is all of R^n; no inequality description")
    keep = _dedupe_rows(np.hstack([A, b[:, None]]))
    return keep[:, :n], keep[:, n]


def as_hpolyhedron(S):
    if isinstance(S, HPolyhedron):
        return S
    if isinstance(S, VPolytope):
        return S.hrep
    raise UnsupportedError(f"{type(S).__name__} has no inequality description")


def as_vpolytope(S):
    if isinstance(S, VPolytope):
        return S
    if isinstance(S, HPolyhedron):
        return S.vrep
    raise UnsupportedError(f"{type(S).__name__} has no vertex description")


# ---------------------------------------------------------------------------
# module-level operations

def contains(S, x, tol=MEMBER_TOL):
    return S.contains(x, tol)


def support(S, d):
    """``(sigma_S(d), argmax)``; ``(inf, None)`` when unbounded in ``d``."""
    return S.support_point(d)


def normal_cone_contains(S, xbar, v, tol=MEMBER_TOL):
    """Whether ``v`` is normal to ``S`` at ``xbar`` (False when ``xbar`` is outside)."""
    xbar = as_vector(xbar, S.n)
    v = as_vector(v, S.n)
    if not S.contains(xbar, tol):
        log.debug("normal_cone_contains: %s is not in the set, normal cone is empty", xbar)
        return False
    return bool(S.support(v) <= v @ xbar + tol)


def horizon_cone(S):
    if isinstance(S, HPolyhedron):
        return PolyhedralCone(S.n, A=S.A)
    if isinstance(S, VPolytope):
        return PolyhedralCone(S.n, rays=S.rays)
    if isinstance(S, Ball):
        return PolyhedralCone(S.n, rays=np.zeros((0, S.n)))
    raise TypeError(type(S).__name__)


def has_interior_origin(F):
    """Check ``0 in int F`` (b >= 1e-9, 2n interior probes, or ||c|| < r)."""
    if isinstance(F, HPolyhedron):
        return bool(F.m == 0 or np.min(F.b) >= MIN_OFFSET)
    if isinstance(F, Ball):
        return bool(np.linalg.norm(F.center) < F.radius)
    if isinstance(F, VPolytope):
        return F.interior_origin
    raise TypeError(type(F).__name__)


def require_dynamics(F):
    """Raise unless ``F`` can serve as a dynamics set (``0`` interior)."""
    if not isinstance(F, ConvexSet):
        raise TypeError(f"expected a ConvexSet, got {type(F).__name__}")
    if not has_interior_origin(F):
        raise ValidationError("dynamics set must contain the origin in its interior")
    return F


def polar(F):
    require_dynamics(F)
    if isinstance(F, HPolyhedron):
        pts = np.vstack([np.zeros(F.n), F.A / F.b[:, None]]) + 0.0
        return VPolytope(pts)
    if isinstance(F, Ball):
        if np.any(F.center != 0):
            raise UnsupportedError("polar of an off-center ball is not a ball")
        return Ball(np.zeros(F.n), 1.0 / F.radius)
    # a zero vertex gives the vacuous row 0.x <= 1
    V = F.vertices[np.linalg.norm(F.vertices, axis=1) > _ROW_TOL]
    A = np.vstack([V, F.rays])
    b = np.concatenate([np.ones(V.shape[0]), np.zeros(F.rays.shape[0])])
    return HPolyhedron(A, b)


def polar_norm(F):
    """``sup{||v|| : v in F°}``."""
    require_dynamics(F)
    if isinstance(F, HPolyhedron):
        return float(np.max(np.linalg.norm(F.A, axis=1) / F.b))
    if isinstance(F, Ball):
        if np.any(F.center != 0):
            raise UnsupportedError("polar of an off-center ball is not a ball")
        return 1.0 / F.radius
    P = polar(F).vrep
    return float(np.max(np.linalg.norm(P.vertices, axis=1)))


def euclidean_project(S, x):
    return S.project(x)


def is_symmetric(F, tol=MEMBER_TOL):
    """Whether ``F = -F`` (checked on vertices and rays)."""
    if isinstance(F, Ball):
        return bool(np.all(np.abs(F.center) <= tol))
    V = as_vpolytope(F)
    cone = PolyhedralCone(F.n, rays=V.rays)
    return (all(F.contains(-v, tol) for v in V.vertices)
            and all(cone.contains(-r, tol) for r in V.rays))


def bounding_box(S):
    """``(lo, hi)`` corners of the axis-aligned box around a bounded set."""
    if isinstance(S, Ball):
        return S.center - S.radius, S.center + S.radius
    V = as_vpolytope(S) if S.n <= MAX_CONVERT_DIM else None
    if V is not None:
        if V.rays.shape[0]:
            raise ValidationError("unbounded set has no bounding box")
        return V.vertices.min(axis=0), V.vertices.max(axis=0)
    eye = np.eye(S.n)
    hi = np.array([S.support(e) for e in eye])
    lo = -np.array([S.support(-e) for e in eye])
    if not (np.all(np.isfinite(hi)) and np.all(np.isfinite(lo))):
        raise ValidationError("unbounded set has no bounding box")
    return lo, hi


def minkowski_sum(P, Q):
    """``P + Q`` for polyhedral operands, as a ``VPolytope``."""
    P, Q = as_vpolytope(P), as_vpolytope(Q)
    V = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.n)
    return VPolytope(V, np.vstack([P.rays, Q.rays]))


def scaled(S, t):
    """``t * S`` for real ``t`` (negative values reflect)."""
    if isinstance(S, Ball):
        if t == 0:
            raise ValidationError("scaling a ball by 0")
        return Ball(t * S.center, abs(t) * S.radius)
    if isinstance(S, HPolyhedron):
        if t == 0:
            return VPolytope(np.zeros((1, S.n)))
        s = np.sign(t)
        return HPolyhedron(s * S.A, abs(t) * S.b)
    rays = S.rays * np.sign(t) if t != 0 else np.zeros((0, S.n))
    return VPolytope(t * S.vertices, rays)


def set_from_json(obj):
    """Build a set from its JSON dict; raises ``ValidationError`` on schema problems."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValidationError("set must be an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "hpoly":
            return HPolyhedron(np.array(obj["A"], dtype=float), np.array(obj["b"], dtype=float))
        if kind == "vpoly":
            V = np.array(obj["vertices"], dtype=float)
            R = np.array(obj.get("rays", []), dtype=float).reshape(-1, V.shape[-1])
            return VPolytope(V, R)
        if kind == "ball":
            return Ball(np.array(obj["center"], dtype=float), float(obj["radius"]))
    except KeyError as exc:
        raise ValidationError(f"{kind} set is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed {kind} set: {exc}") from None
    raise ValidationError(f"unknown set type {kind!r}")


def set_to_json(S):
    return S.to_json()


def box(lo, hi):
    """Axis-aligned box ``[lo, hi]`` in H-form."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = lo.size
    A = np.vstack([np.eye(n), -np.eye(n)])
    return HPolyhedron(A, np.concatenate([hi, -lo]))

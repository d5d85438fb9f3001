"""Dense two-phase simplex (Bland's rule) and a small active-set projection.

Instances here are tiny (a handful of variables, tens of rows), so everything
is dense and deterministic. The pivot loop itself lives in ``kernels``.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import kernels
from .errors import UnsupportedError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
MAX_ITER = 10**6

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NOT_CONVERGED = "not_converged"


def _as_block(M, n):
    if M is None:
        return np.zeros((0, n))
    M = np.asarray(M, dtype=float)
    return M.reshape(-1, n)


@dataclass(frozen=True)
class LinearProgram:
    """``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= lower``.

    ``lower`` holds one bound per variable; ``-inf`` marks a free variable.
    Leaving it as ``None`` makes every variable free.
    """

    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = c.size
        if n == 0:
            raise ValueError("linear program needs at least one variable")
        A_ub = _as_block(self.A_ub, n)
        A_eq = _as_block(self.A_eq, n)
        b_ub = np.asarray(self.b_ub if self.b_ub is not None else [], dtype=float).ravel()
        b_eq = np.asarray(self.b_eq if self.b_eq is not None else [], dtype=float).ravel()
        if b_ub.size != A_ub.shape[0] or b_eq.size != A_eq.shape[0]:
            raise ValueError("constraint blocks and right-hand sides disagree in length")
        if self.lower is None:
            lower = np.full(n, -np.inf)
        else:
            lower = np.asarray(self.lower, dtype=float).ravel()
            if lower.size != n:
                raise ValueError("need one lower bound per variable")
        for name, val in (("c", c), ("A_ub", A_ub), ("b_ub", b_ub),
                          ("A_eq", A_eq), ("b_eq", b_eq), ("lower", lower)):
            object.__setattr__(self, name, val)

    @property
    def n(self):
        return self.c.size


@dataclass
class LPSolution:
    status: str
    x: Optional[np.ndarray] = None
    value: float = np.nan
    iterations: int = 0
    ray: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self):
        return self.status == OPTIMAL


def solve_lp(p: LinearProgram, tol: float = PIVOT_TOL, max_iter: int = MAX_ITER) -> LPSolution:
    """Solve ``p`` with the dense two-phase primal simplex method.

    Unbounded problems carry a recession direction in ``ray`` along which the
    objective decreases. Hitting ``max_iter`` yields ``not_converged``.
    """
    n = p.n
    lower = p.lower
    finite = np.isfinite(lower)
    # x = lower + x' for bounded variables; x = x+ - x- for free ones
    free_idx = np.flatnonzero(~finite)
    nstd = n + free_idx.size
    shift = np.where(finite, lower, 0.0)

    def expand(M):
        return np.hstack([M, -M[:, free_idx]])

    A_ub = expand(p.A_ub)
    A_eq = expand(p.A_eq)
    b_ub = p.b_ub - p.A_ub @ shift
    b_eq = p.b_eq - p.A_eq @ shift
    cost = np.concatenate([p.c, -p.c[free_idx]])

    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    if m == 0:
        if np.any(cost < -tol):
            j = int(np.flatnonzero(cost < -tol)[0])
            return LPSolution(UNBOUNDED, ray=_to_original(np.eye(nstd)[j], n, free_idx))
        return LPSolution(OPTIMAL, shift.copy(), float(p.c @ shift), 0)

    # columns: structural | slacks | artificials
    nslack = m_ub
    rows = np.zeros((m, nstd + nslack))
    rows[:m_ub, :nstd] = A_ub
    rows[:m_ub, nstd:] = np.eye(m_ub)
    rows[m_ub:, :nstd] = A_eq
    rhs = np.concatenate([b_ub, b_eq])
    neg = rhs < 0
    rows[neg] *= -1.0
    rhs = np.where(neg, -rhs, rhs)

    basis = np.full(m, -1, dtype=np.int64)
    for i in range(m_ub):
        if not neg[i]:
            basis[i] = nstd + i
    need_art = np.flatnonzero(basis < 0)
    nart = need_art.size
    ncore = nstd + nslack
    T = np.zeros((m + 1, ncore + nart + 1))
    T[:m, :ncore] = rows
    T[:m, -1] = rhs
    for k, i in enumerate(need_art):
        T[i, ncore + k] = 1.0
        basis[i] = ncore + k

    iters = 0
    if nart:
        T[m, :] = 0.0
        for i in need_art:
            T[m, :ncore] -= T[i, :ncore]
            T[m, -1] -= T[i, -1]
        status, it, _ = kernels.simplex_iterate(T, basis, ncore + nart, max_iter, tol)
        iters += it
        if status == kernels.ITERATION_LIMIT:
            return LPSolution(NOT_CONVERGED, iterations=iters)
        scale = max(1.0, float(np.max(np.abs(rhs))))
        if -T[m, -1] > FEAS_TOL * scale:
            return LPSolution(INFEASIBLE, iterations=iters)
        T, basis = _drive_out_artificials(T, basis, ncore, tol)
        T = np.ascontiguousarray(np.delete(T, np.s_[ncore:ncore + nart], axis=1))

    m = T.shape[0] - 1
    full_cost = np.zeros(T.shape[1] - 1)
    full_cost[:nstd] = cost
    T[m, :] = 0.0
    T[m, :-1] = full_cost
    for i in range(m):
        cb = full_cost[basis[i]]
        if cb != 0.0:
            T[m, :] -= cb * T[i, :]
    status, it, entering = kernels.simplex_iterate(T, basis, ncore, max_iter - iters, tol)
    iters += it
    if status == kernels.ITERATION_LIMIT:
        return LPSolution(NOT_CONVERGED, iterations=iters)

    xstd = np.zeros(ncore)
    xstd[basis] = T[:m, -1]
    if status == kernels.UNBOUNDED:
        d = np.zeros(ncore)
        d[entering] = 1.0
        d[basis] -= T[:m, entering]
        return LPSolution(UNBOUNDED, iterations=iters,
                          ray=_to_original(d[:nstd], n, free_idx))
    x = shift + _to_original(xstd[:nstd], n, free_idx)
    return LPSolution(OPTIMAL, x, float(p.c @ x), iters)


def _to_original(z, n, free_idx):
    x = z[:n].copy()
    x[free_idx] -= z[n:]
    return x


def _drive_out_artificials(T, basis, ncore, tol):
    m = T.shape[0] - 1
    keep = []
    for i in range(m):
        if basis[i] < ncore:
            keep.append(i)
            continue
        cols = np.flatnonzero(np.abs(T[i, :ncore]) > tol)
        if cols.size == 0:
            continue  # redundant equality row
        j = int(cols[0])
        T[i, :] /= T[i, j]
        for k in range(m + 1):
            if k != i and T[k, j] != 0.0:
                T[k, :] -= T[k, j] * T[i, :]
        basis[i] = j
        keep.append(i)
    keep_rows = keep + [m]
    return np.ascontiguousarray(T[keep_rows]), np.ascontiguousarray(basis[keep])


# ---------------------------------------------------------------------------
# Euclidean projection by active-set enumeration

QP_MAX_DIM = 8
QP_MAX_ROWS = 32


def _kkt_h(A, b, x, idx, tol):
    As = A[list(idx)]
    G = As @ As.T
    if np.linalg.matrix_rank(G, tol=1e-12) < len(idx):
        return None
    lam = np.linalg.solve(G, As @ x - b[list(idx)])
    if np.any(lam < -tol):
        return None
    w = x - As.T @ lam
    if np.all(A @ w <= b + tol * np.maximum(1.0, np.abs(b))):
        return w
    return None


def project_halfspaces(A, b, x, tol=1e-10):
    """Project ``x`` onto ``{w : A w <= b}`` by enumerating active sets."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    m, n = A.shape
    if n > QP_MAX_DIM or m > QP_MAX_ROWS:
        raise UnsupportedError(f"projection capped at n<={QP_MAX_DIM}, m<={QP_MAX_ROWS}")
    if np.all(A @ x <= b):
        return x.copy()
    violated = set(np.flatnonzero(A @ x > b).tolist())
    for size in range(1, min(m, n) + 1):
        # subsets touching a violated row first; the optimum always does
        subsets = sorted(combinations(range(m), size),
                         key=lambda s: (not violated.intersection(s), s))
        for idx in subsets:
            w = _kkt_h(A, b, x, idx, tol)
            if w is not None:
                return w
    raise ArithmeticError("active-set enumeration found no KKT point")


def project_generators(V, R, x, tol=1e-10):
    """Project ``x`` onto ``co(V) + cone(R)`` by enumerating generator supports."""
    V = np.asarray(V, dtype=float).reshape(-1, np.size(x))
    R = np.asarray(R, dtype=float).reshape(-1, np.size(x))
    x = np.asarray(x, dtype=float)
    n = x.size
    k = V.shape[0] + R.shape[0]
    if n > QP_MAX_DIM or k > QP_MAX_ROWS:
        raise UnsupportedError(f"projection capped at n<={QP_MAX_DIM}, {QP_MAX_ROWS} generators")
    nv = V.shape[0]
    for size in range(1, n + 2):
        for sv in range(1, min(size, nv) + 1):
            sr = size - sv
            if sr > R.shape[0]:
                continue
            for vi in combinations(range(nv), sv):
                for ri in combinations(range(R.shape[0]), sr):
                    p = _affine_cone_ls(V[list(vi)], R[list(ri)], x, tol)
                    if p is None:
                        continue
                    g = x - p
                    scale = tol * max(1.0, float(np.linalg.norm(g)))
                    if np.all((V - p) @ g <= scale) and np.all(R @ g <= scale):
                        return p
    raise ArithmeticError("generator enumeration found no KKT point")


def _affine_cone_ls(Vs, Rs, x, tol):
    """Least-squares point of aff(Vs) + span(Rs) nearest x, if its weights are >= 0."""
    v0 = Vs[0]
    D = np.vstack([Vs[1:] - v0, Rs]) if (len(Vs) > 1 or len(Rs)) else np.zeros((0, x.size))
    if D.shape[0] == 0:
        return v0.copy()
    if np.linalg.matrix_rank(D, tol=1e-12) < D.shape[0]:
        return None
    coef = np.linalg.solve(D @ D.T, D @ (x - v0))
    nvx = len(Vs) - 1
    lam = coef[:nvx]
    mu = coef[nvx:]
    if np.any(lam < -tol) or np.any(mu < -tol) or lam.sum() > 1 + tol:
        return None
    return v0 + D.T @ coef


def project_qp(S, x):
    """Euclidean projection onto an H-polyhedron or V-polytope (desk scale)."""
    from .geometry import HPolyhedron, VPolytope

    if isinstance(S, HPolyhedron):
        return project_halfspaces(S.A, S.b, x)
    if isinstance(S, VPolytope):
        return project_generators(S.vertices, S.rays, x)
    raise TypeError(f"project_qp handles polyhedral sets, not {type(S).__name__}")

"""Pure-Python (numpy) implementations of the hot kernels.

These mirror ``_ckernels.pyx`` exactly and are selected by ``kernels`` when the
compiled extension is missing or ``CONVEXTIME_PURE_PYTHON`` is set.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

_RATIO_TIE = 1e-12
_GROWTH_CAP = 2.0 ** 60


def simplex_iterate(T, basis, ncols, max_iter, tol):
    """Run Bland-rule primal simplex pivots on a dense tableau in place.

    ``T`` has one row per constraint plus a final reduced-cost row; the last
    column is the right-hand side. Only columns ``< ncols`` may enter.

    Returns ``(status, iterations, entering)`` where ``entering`` is the
    column that proved unboundedness (``-1`` otherwise).
    """
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    it = 0
    while True:
        cost = T[m, :ncols]
        candidates = np.flatnonzero(cost < -tol)
        if candidates.size == 0:
            return OPTIMAL, it, -1
        if it >= max_iter:
            return ITERATION_LIMIT, it, -1
        j = int(candidates[0])
        col = T[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, it, j
        ratios = T[rows, rhs] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + _RATIO_TIE * max(1.0, abs(best))]
        r = int(tied[np.argmin(basis[tied])])
        T[r, :] /= T[r, j]
        pivot_row = T[r, :].copy()
        factors = T[:, j].copy()
        factors[r] = 0.0
        T -= np.outer(factors, pivot_row)
        T[:, j] = 0.0
        T[r, j] = 1.0
        basis[r] = j
        it += 1


def bisect_hgauge(A, b, X, tol):
    """Gauge of each row of ``X`` w.r.t. ``{y : A y <= b}`` by bisection.

    Only membership ``A x <= t b`` is ever evaluated. Points inside ``tol*F``
    return 0; points whose bracket exceeds 2**60 return ``nan``.
    """
    AX = X @ A.T
    out = np.zeros(X.shape[0])
    member_lo = np.all(AX <= tol * b, axis=1)
    active = ~member_lo
    lo = np.full(X.shape[0], tol)
    hi = np.ones(X.shape[0])
    grow = active & ~np.all(AX <= b, axis=1)
    while grow.any():
        hi[grow] *= 2.0
        lost = grow & (hi > _GROWTH_CAP)
        if lost.any():
            out[lost] = np.nan
            active &= ~lost
            grow &= ~lost
        grow &= ~np.all(AX <= hi[:, None] * b, axis=1)
    lo[active] = np.where(hi[active] > 1.0, hi[active] / 2.0, tol)
    run = active & (hi - lo > tol)
    while run.any():
        mid = 0.5 * (lo + hi)
        inside = np.all(AX <= mid[:, None] * b, axis=1)
        hi = np.where(run & inside, mid, hi)
        lo = np.where(run & ~inside, mid, lo)
        run &= hi - lo > tol
    out[active] = 0.5 * (lo[active] + hi[active])
    return out

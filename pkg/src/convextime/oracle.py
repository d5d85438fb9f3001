"""Brute-force references: bisection gauges, sampled minimal time, subgradient certificates.

Nothing here calls the closed forms it is meant to check. Gauges are found by
bisecting on membership, minima by sampling, subgradients by testing the
defining inequality at many points.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import kernels
from .errors import ValidationError
from .geometry import Ball, MAX_CONVERT_DIM, as_hpolyhedron, as_vector, bounding_box

DEFAULT_SEED = 0x5EED
BISECT_TOL = 1e-11
FD_STEPS = (1e-2, 1e-3, 1e-4)
_GROWTH_CAP = 2.0 ** 60


@dataclass(frozen=True)
class SampleSpec:
    """Sampling recipe: a box, a grid resolution per axis, extra random points and a seed."""

    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    res: int = 201
    n_random: int = 0
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.res < 3:
            raise ValidationError("grid resolution must be at least 3")
        for name in ("lo", "hi"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, np.asarray(val, dtype=float).ravel())

    def with_box(self, lo, hi):
        return SampleSpec(lo, hi, self.res, self.n_random, self.seed)

    def grid(self):
        axes = [np.linspace(a, b, self.res) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def random(self):
        rng = np.random.default_rng(self.seed)
        return self.lo + (self.hi - self.lo) * rng.random((self.n_random, self.lo.size))


@dataclass
class CertReport:
    """Outcome of one certificate. ``passed`` implies ``worst_violation <= tol``."""

    name: str
    passed: bool
    worst_violation: float
    tol: float
    witness: Any = None
    samples: int = 0
    seed: int = DEFAULT_SEED
    details: dict = field(default_factory=dict)

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def to_json(self):
        return {
            "name": self.name,
            "verdict": self.verdict,
            "worst_violation": _json_num(self.worst_violation),
            "tol": _json_num(self.tol),
            "witness": _json_value(self.witness),
            "samples": int(self.samples),
            "seed": int(self.seed),
            "details": _json_value(self.details),
        }


def _json_num(x):
    x = float(x)
    if np.isfinite(x):
        return x
    return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")


def _json_value(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_num(obj)
    if isinstance(obj, dict):
        return {str(k): _json_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in obj]
    return str(obj)


def report(name, violations, tol, points=None, seed=DEFAULT_SEED, **details):
    """Build a ``CertReport`` from an array of violations (positive means bad)."""
    violations = np.asarray(violations, dtype=float).ravel()
    if violations.size == 0:
        return CertReport(name, True, -np.inf, tol, None, 0, seed, details)
    bad = np.where(np.isnan(violations), np.inf, violations)
    k = int(np.argmax(bad))
    worst = float(bad[k])
    witness = None if points is None else np.asarray(points)[k]
    return CertReport(name, bool(worst <= tol), worst, tol, witness, violations.size, seed, details)


# ---------------------------------------------------------------------------
# gauges by bisection

def gauge_bisect_batch(F, X, tol=BISECT_TOL):
    """Gauge of each row of ``X`` by bisection on ``x in tF``.

    Rows that already lie in ``tol * F`` return 0 (horizon directions land
    here); a bracket that outgrows 2**60 returns ``nan``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(F, Ball):
        return _bisect_ball(F, X, tol)
    H = as_hpolyhedron(F)
    return kernels.bisect_hgauge(np.ascontiguousarray(H.A), np.ascontiguousarray(H.b),
                                 np.ascontiguousarray(X), tol)


def gauge_bisect(F, x, tol=BISECT_TOL):
    return float(gauge_bisect_batch(F, as_vector(x, F.n)[None, :], tol)[0])


def _bisect_ball(F, X, tol):
    c, r = F.center, F.radius

    def member(t):
        return np.linalg.norm(X - t[:, None] * c, axis=1) <= t * r

    k = X.shape[0]
    out = np.zeros(k)
    lo = np.full(k, tol)
    hi = np.ones(k)
    active = ~member(lo)
    grow = active & ~member(hi)
    while grow.any():
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, 2.0 * hi, hi)
        lost = grow & (hi > _GROWTH_CAP)
        out[lost] = np.nan
        active &= ~lost
        grow &= ~lost & ~member(hi)
    run = active & (hi - lo > tol)
    while run.any():
        mid = 0.5 * (lo + hi)
        inside = member(mid)
        hi = np.where(run & inside, mid, hi)
        lo = np.where(run & ~inside, mid, lo)
        run &= hi - lo > tol
    out[active] = 0.5 * (lo[active] + hi[active])
    return out


# ---------------------------------------------------------------------------
# minimal time by sampling the target

def target_samples(omega, spec):
    """Grid points of ``spec`` (over ``omega``'s bounding box) that lie in ``omega``, plus its vertices."""
    if not omega.is_bounded:
        raise ValidationError("brute-force sampling needs a bounded target")
    lo, hi = bounding_box(omega)
    if spec.lo is not None:
        lo, hi = spec.lo, spec.hi
    W = spec.with_box(lo, hi).grid()
    if isinstance(omega, Ball):
        keep = np.linalg.norm(W - omega.center, axis=1) <= omega.radius
        extra = np.zeros((0, omega.n))
    else:
        if omega.n > MAX_CONVERT_DIM:
            raise ValidationError("brute-force sampling of polyhedra needs n <= 4")
        H = as_hpolyhedron(omega)
        keep = np.all(W @ H.A.T <= H.b, axis=1)
        extra = omega.vrep.vertices if hasattr(omega, "vrep") else omega.vertices
    return np.vstack([W[keep], extra])


def mintime_bruteforce(F, omega, x, spec=None, return_point=False):
    """``min rho_F(w - x)`` over sampled ``w`` in ``omega``; an upper bound on ``T(x)``."""
    spec = spec or SampleSpec()
    x = as_vector(x, F.n)
    W = target_samples(omega, spec)
    if omega.contains(x, 0.0):
        W = np.vstack([W, x])
    vals = gauge_bisect_batch(F, W - x)
    k = int(np.nanargmin(vals))
    return (float(vals[k]), W[k]) if return_point else float(vals[k])


# ---------------------------------------------------------------------------
# subgradient certificates and directional derivatives

PROBE_STEPS = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)


def probe_directions(n, n_dirs=32, seed=DEFAULT_SEED):
    """Coordinate directions (both signs) followed by ``n_dirs`` seeded random unit vectors."""
    rng = np.random.default_rng(seed)
    R = rng.standard_normal((n_dirs, n))
    return np.vstack([np.eye(n), -np.eye(n), R / np.linalg.norm(R, axis=1, keepdims=True)])


def structured_points(xbar, steps=PROBE_STEPS, n_dirs=32, seed=DEFAULT_SEED):
    """``xbar + h d`` for every step ``h`` and every probe direction ``d``."""
    xbar = as_vector(xbar)
    D = probe_directions(xbar.size, n_dirs, seed)
    return np.vstack([xbar + h * D for h in steps])


def subgradient_certify(f, xbar, v, spec=None, tol=1e-7, extra=None, name="subgradient",
                        n_dirs=32):
    """Test ``<v, x - xbar> <= f(x) - f(xbar)`` at the samples.

    The violation is normalized by ``max(1, |x - xbar|)`` so far-away samples
    use a relative tolerance. Samples: the random part of ``spec``, points
    ``xbar + h d`` along coordinate and random directions, and ``extra``.
    """
    spec = spec or SampleSpec(n_random=0)
    xbar = as_vector(xbar)
    v = as_vector(v, xbar.size)
    parts = [structured_points(xbar, n_dirs=n_dirs, seed=spec.seed)]
    if spec.n_random and spec.lo is not None:
        parts.append(spec.random())
    if extra is not None and len(extra):
        parts.append(np.atleast_2d(np.asarray(extra, dtype=float)))
    P = np.vstack(parts)
    f0 = f(xbar)
    fx = np.array([f(p) for p in P])
    D = P - xbar
    with np.errstate(invalid="ignore"):
        viol = (D @ v - (fx - f0)) / np.maximum(1.0, np.linalg.norm(D, axis=1))
    viol = np.where(np.isposinf(fx), -np.inf, viol)
    return report(name, viol, tol, P, spec.seed)


def dirderiv_fd(f, xbar, d, steps=FD_STEPS):
    """One-sided directional derivative from difference quotients, Richardson-extrapolated.

    For a convex ``f`` the quotients decrease as ``h`` shrinks; the last two
    are combined assuming an O(h) error.
    """
    xbar = as_vector(xbar)
    d = as_vector(d, xbar.size)
    f0 = f(xbar)
    q = [(f(xbar + h * d) - f0) / h for h in steps]
    if len(q) < 2:
        return float(q[0])
    h1, h2 = steps[-2], steps[-1]
    return float((h1 * q[-1] - h2 * q[-2]) / (h1 - h2))


def difference_quotients(f, xbar, d, steps=FD_STEPS):
    """The raw quotients ``(f(xbar + h d) - f(xbar)) / h`` behind ``dirderiv_fd``."""
    xbar = as_vector(xbar)
    f0 = f(xbar)
    return [(f(xbar + h * as_vector(d)) - f0) / h for h in steps]


def memoize_points(f):
    """Cache a pointwise function on the exact bytes of its argument."""
    cache = {}

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        if key not in cache:
            cache[key] = f(x)
        return cache[key]

    return wrapped


def subgradient_margin(f, xbar, v, n_dirs=32, seed=DEFAULT_SEED, steps=FD_STEPS):
    """Lower estimate of ``dist(v, df(xbar))`` as ``max_d <v, d> - f'(xbar; d)``.

    The smallest difference quotient stands in for ``f'(xbar; d)``; for convex
    ``f`` it overestimates the derivative, so the margin is underestimated.
    """
    xbar = as_vector(xbar)
    v = as_vector(v, xbar.size)
    D = probe_directions(xbar.size, n_dirs, seed)
    return max(float(v @ d) - min(difference_quotients(f, xbar, d, steps)) for d in D)


# ---------------------------------------------------------------------------
# infimal convolution by sampling

def infconv_sample(mu, rho, x, spec, refine_iters=50):
    """``min_y mu(y) + rho(x - y)`` over the grid of ``spec`` plus ``x``, then coordinate descent.

    ``mu`` and ``rho`` act on the rows of an array. Refinement starts at the
    best sample with the grid spacing as step and halves the step whenever no
    coordinate move improves.
    """
    x = as_vector(x)
    Y = np.vstack([spec.grid(), x])
    vals = mu(Y) + rho(x - Y)
    k = int(np.argmin(vals))
    y, best = Y[k].copy(), float(vals[k])
    step = float(np.max((spec.hi - spec.lo) / (spec.res - 1)))
    n = x.size
    moves = np.vstack([np.eye(n), -np.eye(n)])
    for _ in range(refine_iters):
        cand = y + step * moves
        cv = mu(cand) + rho(x - cand)
        j = int(np.argmin(cv))
        if cv[j] < best:
            y, best = cand[j], float(cv[j])
        else:
            step *= 0.5
    return best

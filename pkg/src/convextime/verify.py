"""Property suites that pit the closed forms against the brute-force oracles.

Every check returns ``CertReport`` objects tagged with the acceptance criterion
they feed (``details["criterion"]``). Reports carry no timings, so a bundle is
a pure function of the seed.
"""

from dataclasses import dataclass, field
import json
from typing import Callable
import zlib

import numpy as np

from .fixtures import dynamics_fixtures, slab, symmetric_dynamics, target_fixtures
from .gauge import GaugeValue, gauge, gauge_batch, gauge_subdiff_contains
from .geometry import (
    Ball, VPolytope, as_vpolytope, box, minkowski_sum, polar, polar_norm, scaled,
)
from .mintime import (
    IN_F_CLOSURE, IN_TARGET, OUTSIDE, eval_mintime, f_closure_explicit, in_f_closure,
    mintime, mintime_subdiff_contains, mintime_subdiff_via_projection, shift_inequality_check,
)
from .oracle import (
    DEFAULT_SEED, SampleSpec, gauge_bisect_batch, infconv_sample, memoize_points,
    mintime_bruteforce, report, subgradient_certify, subgradient_margin, dirderiv_fd,
)
from .signed import (
    BOUNDARY, EXTERIOR, INTERIOR, complement_mintime, eval_signed_mintime,
    infconv_eval, mu_batch, q_set, reverse_normal_check, signed_distance, signed_distance_subdiff,
)

SUITES = ("gauge", "mintime", "signed", "sdist")
FAULTS = ("gauge-scale",)
MARGIN = 0.1
PROBE_DIRS = 64


@dataclass
class Context:
    """Seed, size scaling and the gauge under test (swapped out for fault injection)."""

    seed: int = DEFAULT_SEED
    scale: float = 1.0
    gauge_fn: Callable = gauge
    reports: list = field(default_factory=list)

    def rng(self, name):
        return np.random.default_rng([self.seed, zlib.crc32(name.encode())])

    def size(self, n):
        return max(1, int(round(n * self.scale)))

    def add(self, rep, criterion=None):
        if criterion is not None:
            rep.details["criterion"] = criterion
        self.reports.append(rep)
        return rep


def scaled_gauge(factor=1.01):
    """A deliberately wrong gauge, used to prove the gauge suite can fail."""
    def broken(F, x):
        g = gauge(F, x)
        return GaugeValue(factor * g.value, g.witness, g.horizon)
    return broken


# ---------------------------------------------------------------------------
# gauge suite

def _gauge_points(ctx, name, F, count):
    rng = ctx.rng(name)
    X = 3.0 * rng.standard_normal((count, F.n))
    X[0] = 0.0
    if not F.is_bounded:
        X[1:6] = [[-7.0, 0.0], [-1.0, 0.0], [-1e-3, 0.0], [-50.0, 0.0], [-2.5, 0.0]]
    return X


def _gauge_values(ctx, F, X):
    return np.array([ctx.gauge_fn(F, x).value for x in X])


def _polar_subgradient(F, x):
    """An element of the gauge subdifferential at ``x`` read off the polar set."""
    if isinstance(F, Ball):
        nx = np.linalg.norm(x)
        return x / (F.radius * nx) if nx else np.zeros_like(x)
    P = polar(F)
    P = as_vpolytope(P)
    return P.vertices[int(np.argmax(P.vertices @ x))]


def check_gauge(ctx, name, F):
    n = ctx.size(1000)
    X = _gauge_points(ctx, f"gauge/{name}", F, n)
    g = _gauge_values(ctx, F, X)
    ref = gauge_bisect_batch(F, X)
    ctx.add(report(f"gauge_oracle[{name}]", np.abs(g - ref), 1e-8, X, ctx.seed), 1)

    rng = ctx.rng(f"gauge-props/{name}")
    Y = 3.0 * rng.standard_normal((n, F.n))
    lam = rng.uniform(0.01, 10.0, n)
    gy = _gauge_values(ctx, F, Y)
    glam = _gauge_values(ctx, F, lam[:, None] * X)
    ctx.add(report(f"gauge_homogeneity[{name}]",
                   np.abs(glam - lam * g) / np.maximum(1.0, lam * g), 1e-9, X, ctx.seed))
    gsum = _gauge_values(ctx, F, X + Y)
    ctx.add(report(f"gauge_subadditivity[{name}]", gsum - g - gy, 1e-9, X, ctx.seed))
    L = polar_norm(F)
    ctx.add(report(f"gauge_lipschitz[{name}]",
                   np.abs(g - gy) - L * np.linalg.norm(X - Y, axis=1), 1e-9, X, ctx.seed))

    viol = []
    for x in X[: ctx.size(20)]:
        v = _polar_subgradient(F, x)
        ok = gauge_subdiff_contains(F, x, v)
        Z = x + 2.0 * rng.standard_normal((ctx.size(1000), F.n))
        gz = gauge_batch(F, Z)
        worst = float(np.max(ctx.gauge_fn(F, x).value + (Z - x) @ v - gz))
        viol.append(worst if ok else np.inf)
    ctx.add(report(f"gauge_subgradient[{name}]", viol, 1e-7, X[: len(viol)], ctx.seed))


def suite_gauge(ctx):
    for name, F in dynamics_fixtures().items():
        check_gauge(ctx, name, F)


# ---------------------------------------------------------------------------
# mintime suite

CONTINUITY_PAIRS = (("box", "box"), ("ball1", "triangle"), ("ball2", "box_v"),
                    ("triangle", "box"), ("slab", "segment"))


def _target_points(omega):
    if isinstance(omega, Ball):
        return [omega.center, omega.center + np.array([omega.radius, 0.0])]
    V = as_vpolytope(omega).vertices
    return [V[0], V.mean(axis=0)]


def check_mintime_oracle(ctx, fname, F, oname, omega, res=201):
    spec = SampleSpec(res=res, seed=ctx.seed)
    rng = ctx.rng(f"mintime-oracle/{fname}/{oname}")
    outside = [np.array([3.0, 1.0]), np.array([-2.5, 0.5])]
    while len(outside) < 2 + ctx.size(2):
        x = rng.uniform(-3.0, 3.0, 2)
        if not omega.contains(x):
            outside.append(x)
    viol = []
    for x in outside:
        t = eval_mintime(F, omega, x).value
        o = mintime_bruteforce(F, omega, x, spec)
        viol.append(max((t - 1e-9) - o, o - (t + 2e-2)))
    ctx.add(report(f"mintime_oracle[{fname}/{oname}]", viol, 0.0, outside, ctx.seed), 2)
    pts = _target_points(omega)
    zero = [abs(eval_mintime(F, omega, x).value) + abs(mintime_bruteforce(F, omega, x, spec))
            for x in pts]
    ctx.add(report(f"mintime_zero_on_target[{fname}/{oname}]", zero, 0.0, pts, ctx.seed), 2)


def check_continuity(ctx, fname, oname, pairs=10**4):
    F = dynamics_fixtures()[fname]
    omega = target_fixtures()[oname]
    rng = ctx.rng(f"continuity/{fname}/{oname}")
    k = ctx.size(pairs)
    X = rng.uniform(-3.0, 3.0, (k, 2))
    near = rng.random(k) < 0.5
    Y = np.where(near[:, None], X + 0.5 * rng.standard_normal((k, 2)), rng.uniform(-3.0, 3.0, (k, 2)))
    tx = np.array([mintime(F, omega, x) for x in X])
    ty = np.array([mintime(F, omega, y) for y in Y])
    bound = np.maximum(gauge_batch(F, Y - X), gauge_batch(F, X - Y))
    ctx.add(report(f"continuity[{fname}/{oname}]", np.abs(tx - ty) - bound, 1e-7, X, ctx.seed), 3)
    L = polar_norm(F)
    ctx.add(report(f"lipschitz[{fname}/{oname}]",
                   np.abs(tx - ty) - L * np.linalg.norm(X - Y, axis=1), 1e-7, X, ctx.seed), 3)
    return X, tx


def check_convexity(ctx, fname, oname, pairs=2000):
    F = dynamics_fixtures()[fname]
    omega = target_fixtures()[oname]
    rng = ctx.rng(f"convexity/{fname}/{oname}")
    k = ctx.size(pairs)
    X = rng.uniform(-3.0, 3.0, (k, 2))
    U = rng.uniform(-3.0, 3.0, (k, 2))
    lam = rng.random(k)
    M = lam[:, None] * X + (1 - lam[:, None]) * U
    viol = [mintime(F, omega, m) - l * mintime(F, omega, x) - (1 - l) * mintime(F, omega, u)
            for m, l, x, u in zip(M, lam, X, U)]
    ctx.add(report(f"mintime_convexity[{fname}/{oname}]", viol, 1e-7, M, ctx.seed))


def check_f_closure(ctx):
    F = slab()
    omega = VPolytope([[0.0, 0.0]])
    explicit = f_closure_explicit(F, omega)
    rng = ctx.rng("f-closure/slab")
    k = ctx.size(500)
    ray = np.column_stack([np.r_[0.0, rng.uniform(0.0, 10.0, k - 1)], np.zeros(k)])
    rand = rng.uniform(-5.0, 5.0, (k, 2))
    off = np.column_stack([rng.uniform(-5.0, 5.0, 20), np.full(20, 1e-3)])
    left = np.column_stack([np.full(10, -1e-3), np.zeros(10)])
    P = np.vstack([ray, rand, off, left])
    expected = (np.abs(P[:, 1]) <= 1e-6) & (P[:, 0] >= -1e-6)
    got = np.array([in_f_closure(F, omega, p) for p in P])
    exp_set = np.array([explicit.contains(p) for p in P])
    ctx.add(report("f_closure[slab/point]", (got != expected).astype(float), 0.0, P, ctx.seed,
                   samples_on_ray=int(expected.sum())), 4)
    ctx.add(report("f_closure_explicit[slab/point]", (got != exp_set).astype(float), 0.0, P,
                   ctx.seed), 4)

    dyn = dynamics_fixtures()
    for fname in ("box", "ball1", "ball2", "triangle"):
        for oname in ("box", "triangle", "segment", "disc"):
            F, omega = dyn[fname], target_fixtures()[oname]
            rng = ctx.rng(f"f-closure/{fname}/{oname}")
            P = np.vstack([rng.uniform(-2.0, 2.0, (ctx.size(100), 2)), _target_points(omega)])
            bad = [float(in_f_closure(F, omega, p) != omega.contains(p)) for p in P]
            ctx.add(report(f"f_closure_bounded[{fname}/{oname}]", bad, 0.0, P, ctx.seed), 4)


EXPANSION_FIXTURES = (("box", "triangle", 0.5), ("triangle", "box", 0.75))


def check_expansion(ctx):
    dyn, tgt = dynamics_fixtures(), target_fixtures()
    for fname, oname, r in EXPANSION_FIXTURES:
        F, omega = dyn[fname], tgt[oname]
        grown = minkowski_sum(omega, scaled(F, -r))
        rng = ctx.rng(f"expansion/{fname}/{oname}")
        pts, viol = [], []
        while len(pts) < ctx.size(100):
            x = rng.uniform(-4.0, 4.0, 2)
            t = mintime(F, omega, x)
            if t > r:
                pts.append(x)
                viol.append(abs(t - (mintime(F, grown, x) + r)))
        ctx.add(report(f"expansion[{fname}/{oname}/r={r}]", viol, 1e-6, pts, ctx.seed), 5)


def _sample_in(F, rng):
    """A random point of a polyhedral or ball dynamics set."""
    if isinstance(F, Ball):
        d = rng.standard_normal(F.n)
        return F.center + F.radius * rng.random() * d / np.linalg.norm(d)
    V = as_vpolytope(F)
    lam = rng.dirichlet(np.ones(V.vertices.shape[0]))
    p = lam @ V.vertices
    if V.rays.shape[0]:
        p = p + rng.uniform(0.0, 3.0, V.rays.shape[0]) @ V.rays
    return p


def check_shift(ctx):
    dyn, tgt = dynamics_fixtures(), target_fixtures()
    for fname, oname in (("ball1", "box"), ("slab", "triangle")):
        F, omega = dyn[fname], tgt[oname]
        rng = ctx.rng(f"shift/{fname}/{oname}")
        bad, pts = [], []
        for _ in range(ctx.size(1000)):
            x = rng.uniform(-3.0, 3.0, 2)
            f = _sample_in(F, rng)
            t = rng.uniform(0.0, 3.0)
            pts.append(x)
            bad.append(0.0 if shift_inequality_check(F, omega, x, f, t) else 1.0)
        ctx.add(report(f"shift_inequality[{fname}/{oname}]", bad, 0.0, pts, ctx.seed), 5)


# subdifferential probes: (dynamics, target, points) per case
SUBDIFF_PROBES = {
    IN_TARGET: [("ball1", "box", [(1, 0), (1, 1), (-1, 0.5), (0, 0), (0.3, -1)]),
                ("triangle", "triangle", [(0, 0), (0.5, 0.5), (1, 0), (0.5, 0), (0.2, 0.2)])],
    IN_F_CLOSURE: [("slab", "point", [(0.5, 0), (2, 0), (5, 0)]),
                   ("slab", "segment", [(1.5, 0), (3, 0), (7, 0)])],
    OUTSIDE: [("ball1", "box", [(3, 0), (3, 1), (-2, 2.5)]),
              ("box", "triangle", [(2, 2), (-1.5, 0.3), (0.5, -2)]),
              ("triangle", "box", [(3, 0), (-2, -1.5)]),
              ("slab", "box", [(-3, 0.5), (-2, -1.5)])],
}


def _members_hint(F, omega, xbar, case):
    """Likely subgradients, so that accepted probes are not all the zero vector."""
    out = [np.zeros(2)]
    if case == OUTSIDE:
        res = eval_mintime(F, omega, xbar)
        y = res.w - xbar
        if isinstance(F, Ball):
            out.append(-y / (F.radius * np.linalg.norm(y)))
        else:
            P = as_vpolytope(polar(F)).vertices
            vals = P @ y
            top = P[vals >= vals.max() - 1e-9]
            out.extend(-top)
            if len(top) > 1:
                out.append(-top.mean(axis=0))
    else:
        for d in np.array([[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [-1, 1], [1, -1], [-1, -1]]):
            s = F.support(-d)
            if np.isfinite(s) and s > 0:
                out.extend([d / s, 0.5 * d / s])
    return out


def check_subdiff(ctx, probes_per_point=None):
    dyn, tgt = dynamics_fixtures(), target_fixtures()
    cand_grid = np.round(np.arange(-1.5, 1.5 + 1e-9, 0.05), 10)
    for case, fixtures in SUBDIFF_PROBES.items():
        bad, pts, counts, agree = [], [], {"accepted": 0, "rejected": 0, "margin_rejected": 0}, []
        for fname, oname, xbars in fixtures:
            F, omega = dyn[fname], tgt[oname]
            for xb in xbars:
                xbar = np.array(xb, dtype=float)
                f = memoize_points(lambda x, F=F, omega=omega: mintime(F, omega, x))
                rng = ctx.rng(f"subdiff/{case}/{fname}/{oname}/{xb}")
                cands = _members_hint(F, omega, xbar, case)
                for c in list(cands):
                    cands.append(c + 0.05 * rng.choice([-1, 1], 2) * rng.random(2))
                k = probes_per_point or ctx.size(12)
                cands.extend(np.column_stack([rng.choice(cand_grid, k), rng.choice(cand_grid, k)]))
                for v in cands:
                    verdict = mintime_subdiff_contains(F, omega, xbar, v)
                    if verdict.case != case:
                        bad.append(1.0)
                        pts.append(np.r_[xbar, v])
                        continue
                    cert = subgradient_certify(f, xbar, v, SampleSpec(seed=ctx.seed),
                                               n_dirs=PROBE_DIRS)
                    if verdict.verdict:
                        counts["accepted"] += 1
                        bad.append(0.0 if cert.passed else 1.0)
                    else:
                        counts["rejected"] += 1
                        margin = subgradient_margin(f, xbar, v, PROBE_DIRS, ctx.seed)
                        if margin >= MARGIN:
                            counts["margin_rejected"] += 1
                            bad.append(1.0 if cert.passed else 0.0)
                        else:
                            bad.append(0.0)
                    pts.append(np.r_[xbar, v])
                    if case == OUTSIDE and omega.is_bounded:
                        other = mintime_subdiff_via_projection(F, omega, xbar, v)
                        agree.append(0.0 if other == verdict.verdict else 1.0)
        ctx.add(report(f"subdiff_vs_certificate[{case}]", bad, 0.0, pts, ctx.seed, **counts), 6)
        if case == OUTSIDE:
            ctx.add(report("subdiff_vs_projection[outside]", agree, 0.0, pts, ctx.seed), 6)


def suite_mintime(ctx):
    dyn, tgt = dynamics_fixtures(), target_fixtures()
    for fname, F in dyn.items():
        for oname, omega in tgt.items():
            check_mintime_oracle(ctx, fname, F, oname, omega)
    for fname, oname in CONTINUITY_PAIRS:
        check_continuity(ctx, fname, oname)
    check_convexity(ctx, "ball1", "triangle")
    check_convexity(ctx, "slab", "box")
    check_f_closure(ctx)
    check_expansion(ctx)
    check_shift(ctx)
    check_subdiff(ctx)


# ---------------------------------------------------------------------------
# signed suite

def _box_region(P, band=1e-6):
    m = np.max(np.abs(P), axis=1)
    region = np.where(m < 1.0, INTERIOR, np.where(m > 1.0, EXTERIOR, BOUNDARY))
    return region, np.abs(m - 1.0) <= band


def check_signed_grid(ctx, fname, res=101):
    F = dynamics_fixtures()[fname]
    omega = box([-1, -1], [1, 1])
    r = ctx.size(res) if ctx.scale < 1 else res
    axis = np.linspace(-3.0, 3.0, max(r, 3))
    P = np.array([(x, y) for y in axis for x in axis])
    ident, regions = [], []
    for p in P:
        sv = eval_signed_mintime(F, omega, p)
        inside = omega.contains(p, 0.0)
        t_in = 0.0 if inside else eval_mintime(F, omega, p).value
        t_out = complement_mintime(F, omega, p)
        ident.append(abs(sv.value - (t_in - t_out)))
        regions.append(sv.region)
    ctx.add(report(f"signed_identity[{fname}/box]", ident, 1e-7, P, ctx.seed), 7)
    geo, band = _box_region(P)
    mismatch = (np.array(regions) != geo) & ~band
    ctx.add(report(f"region[{fname}/box]", mismatch.astype(float), 0.0, P, ctx.seed), 7)


def check_signed_convexity(ctx, fname, pairs=2000):
    F = dynamics_fixtures()[fname]
    omega = box([-1, -1], [1, 1])
    rng = ctx.rng(f"signed-convexity/{fname}")
    k = ctx.size(pairs)
    X = rng.uniform(-3.0, 3.0, (k, 2))
    Y = np.where((rng.random(k) < 0.5)[:, None], rng.uniform(-1.2, 1.2, (k, 2)),
                 rng.uniform(-3.0, 3.0, (k, 2)))
    d = lambda p: eval_signed_mintime(F, omega, p).value
    dx = np.array([d(x) for x in X])
    dy = np.array([d(y) for y in Y])
    dm = np.array([d(m) for m in 0.5 * (X + Y)])
    ctx.add(report(f"signed_midpoint_convexity[{fname}/box]", dm - 0.5 * (dx + dy), 1e-7,
                   X, ctx.seed), 7)
    L = polar_norm(F)
    ctx.add(report(f"signed_lipschitz[{fname}/box]",
                   np.abs(dx - dy) - L * np.linalg.norm(X - Y, axis=1), 1e-7, X, ctx.seed))


INFCONV_POINTS = [(0, 0), (0.3, 0.5), (-0.7, 0.2), (0.99, 0.2), (1.01, -0.5), (-0.5, -1.02),
                  (3, 1), (-2, -2.5), (0, 1.7)]
WITNESS_POINT = (3.0, 0.0)


def check_infconv(ctx):
    omega = box([-1, -1], [1, 1])
    for fname, F in symmetric_dynamics().items():
        viol = [abs(infconv_eval(F, omega, p) - eval_signed_mintime(F, omega, p).value)
                for p in INFCONV_POINTS]
        ctx.add(report(f"infconv[{fname}/box]", viol, 2e-3, INFCONV_POINTS, ctx.seed), 7)


def nonsymmetric_gap():
    """``Delta(x) - (mu inf-conv rho)(x)`` for the triangle dynamics at the pinned point."""
    F = dynamics_fixtures()["triangle"]
    omega = box([-1, -1], [1, 1])
    spec = SampleSpec([-1, -1], [1, 1], res=100)
    ic = infconv_sample(mu_batch(F, omega), lambda Y: gauge_batch(F, Y), np.array(WITNESS_POINT), spec)
    return eval_signed_mintime(F, omega, WITNESS_POINT).value - ic


def check_nonsymmetric(ctx):
    gap = nonsymmetric_gap()
    ctx.add(report("nonsymmetric_witness[triangle/box]", [0.05 - gap], 0.0, [WITNESS_POINT],
                   ctx.seed, gap=gap), 7)


def suite_signed(ctx):
    for fname in ("ball1", "box"):
        check_signed_grid(ctx, fname)
    for fname in symmetric_dynamics():
        check_signed_convexity(ctx, fname)
    check_infconv(ctx)
    check_nonsymmetric(ctx)


# ---------------------------------------------------------------------------
# signed distance suite

def check_sdist(ctx):
    omega = box([-1, -1], [1, 1])
    ext = signed_distance_subdiff(omega, [3, 0])
    err = np.max(np.abs(ext.payload - [1, 0])) if ext.kind == "singleton" else np.inf
    ctx.add(report("sdist_exterior[(3,0)]", [err], 1e-12, [(3, 0)], ctx.seed, kind=ext.kind), 8)

    inn = signed_distance_subdiff(omega, [0, 0])
    want = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    if inn.kind == "polytope":
        V = inn.payload
        err = max(max(np.min(np.linalg.norm(V - w, axis=1)) for w in want),
                  max(np.min(np.linalg.norm(want - v, axis=1)) for v in V))
    else:
        err = np.inf
    ctx.add(report("sdist_interior[(0,0)]", [err], 1e-12, [(0, 0)], ctx.seed, kind=inn.kind), 8)

    corner = signed_distance_subdiff(omega, [1, 1])
    dhat = lambda p: signed_distance(omega, p).value
    theta = 2 * np.pi * np.arange(16) / 16
    D = np.column_stack([np.cos(theta), np.sin(theta)])
    err = [abs(corner.support(d) - dirderiv_fd(dhat, np.array([1.0, 1.0]), d)) for d in D]
    ctx.add(report("sdist_corner_support[(1,1)]", err, 1e-3, D, ctx.seed, kind=corner.kind), 8)
    r = np.sqrt(0.5)
    wrong = [float(not corner.membership([r, r])), float(corner.membership([0.4, 0.4]))]
    ctx.add(report("sdist_corner_membership[(1,1)]", wrong, 0.0, [(r, r), (0.4, 0.4)], ctx.seed), 8)

    rng = ctx.rng("reverse-normal")
    bad, pts = [], []
    while len(pts) < ctx.size(1000):
        x = rng.uniform(-0.999, 0.999, 2)
        for w in q_set(omega, x):
            bad.append(0.0 if reverse_normal_check(omega, x, w) else 1.0)
        pts.append(x)
    ctx.add(report("reverse_normal[box]", bad, 0.0, None, ctx.seed, interior_probes=len(pts)), 8)

    check_sdist_soundness(ctx, omega, dhat)


def check_sdist_soundness(ctx, omega, dhat):
    bad, pts = [], []
    counts = {"accepted": 0, "margin_rejected": 0}
    grid = np.round(np.arange(-1.5, 1.5 + 1e-9, 0.05), 10)
    for xb in [(3, 0), (2, 2), (0, 0), (0.5, 0), (0.2, -0.3), (1, 1), (1, 0), (-1, 0.4)]:
        xbar = np.array(xb, dtype=float)
        desc = signed_distance_subdiff(omega, xbar)
        f = memoize_points(dhat)
        rng = ctx.rng(f"sdist-sound/{xb}")
        cands = [np.column_stack([rng.choice(grid, ctx.size(12)), rng.choice(grid, ctx.size(12))])]
        if desc.kind == "singleton":
            cands.append(desc.payload[None, :])
        elif desc.kind == "polytope":
            cands.append(desc.payload)
            cands.append(desc.payload.mean(axis=0)[None, :])
        else:
            G = desc.payload.generators
            cands.append(G)
            s = G.sum(axis=0)
            cands.append((s / np.linalg.norm(s))[None, :])
        for v in np.vstack(cands):
            cert = subgradient_certify(f, xbar, v, SampleSpec(seed=ctx.seed), n_dirs=PROBE_DIRS)
            if desc.membership(v):
                counts["accepted"] += 1
                bad.append(0.0 if cert.passed else 1.0)
            else:
                margin = subgradient_margin(f, xbar, v, PROBE_DIRS, ctx.seed)
                if margin >= MARGIN:
                    counts["margin_rejected"] += 1
                    bad.append(1.0 if cert.passed else 0.0)
                else:
                    bad.append(0.0)
            pts.append(np.r_[xbar, v])
    ctx.add(report("sdist_subdiff_soundness[box]", bad, 0.0, pts, ctx.seed, **counts))


def suite_sdist(ctx):
    check_sdist(ctx)


_RUNNERS = {"gauge": suite_gauge, "mintime": suite_mintime, "signed": suite_signed,
            "sdist": suite_sdist}


def run_suite(name, seed=DEFAULT_SEED, scale=1.0, fault=None):
    """Run one suite and return its reports."""
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}")
    ctx = Context(seed=seed, scale=scale)
    if fault == "gauge-scale":
        ctx.gauge_fn = scaled_gauge()
    elif fault is not None:
        raise ValueError(f"unknown fault {fault!r}")
    _RUNNERS[name](ctx)
    return ctx.reports


def run_bundle(suites, seed=DEFAULT_SEED, scale=1.0, fault=None):
    """Run several suites and assemble a JSON-ready bundle."""
    out = {"seed": int(seed), "scale": float(scale), "fault": fault, "suites": {}}
    for name in suites:
        reps = run_suite(name, seed, scale, fault)
        out["suites"][name] = {
            "passed": all(r.passed for r in reps),
            "reports": [r.to_json() for r in reps],
        }
    out["passed"] = all(s["passed"] for s in out["suites"].values())
    return out


def dump_bundle(bundle):
    """Canonical serialization: sorted keys, shortest round-trip floats."""
    return json.dumps(bundle, sort_keys=True, indent=2) + "\n"

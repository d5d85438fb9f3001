"""The compiled and pure-Python kernels must agree exactly."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from convextime import _pykernels, kernels
from convextime.fixtures import dynamics_fixtures
from convextime.geometry import as_hpolyhedron

from strategies import hpolytopes

BACKENDS = kernels.available_backends()
needs_cython = pytest.mark.skipif("cython" not in BACKENDS, reason="extension not built")


def test_python_backend_always_available():
    assert BACKENDS["python"] is _pykernels


def test_env_forces_fallback():
    code = "from convextime import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, CONVEXTIME_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


@needs_cython
@given(hpolytopes(), arrays(np.float64, (30, 2), elements=st.floats(-20, 20)))
def test_bisection_backends_bitwise(P, X):
    H = as_hpolyhedron(P)
    a = BACKENDS["python"].bisect_hgauge(H.A, H.b, X, 1e-11)
    b = BACKENDS["cython"].bisect_hgauge(H.A, H.b, X, 1e-11)
    assert np.array_equal(a, b, equal_nan=True)


def test_bisection_per_point_independent_of_batch():
    H = as_hpolyhedron(dynamics_fixtures()["triangle"])
    X = np.random.default_rng(3).uniform(-4, 4, (50, 2))
    whole = _pykernels.bisect_hgauge(H.A, H.b, X, 1e-11)
    single = np.array([_pykernels.bisect_hgauge(H.A, H.b, x[None], 1e-11)[0] for x in X])
    assert np.array_equal(whole, single)


def test_bisection_horizon_and_escape():
    A = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    b = np.ones(3)
    out = _pykernels.bisect_hgauge(A, b, np.array([[-7.0, 0.0], [0.0, 0.0], [3.0, 0.0]]), 1e-11)
    assert out[0] == 0.0 and out[1] == 0.0
    assert out[2] == pytest.approx(3.0, abs=1e-10)


def _random_tableau(rng, m=8, n=6):
    A = rng.uniform(-1, 1, (m, n))
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = rng.uniform(0.5, 2, m)
    T[m, :n] = rng.uniform(-1, 1, n)
    return T, np.arange(n, n + m, dtype=np.int64), n + m


@needs_cython
@pytest.mark.parametrize("seed", range(25))
def test_simplex_backends_bitwise(seed):
    T0, basis0, ncols = _random_tableau(np.random.default_rng(seed))
    results = []
    for mod in (BACKENDS["python"], BACKENDS["cython"]):
        T, basis = T0.copy(), basis0.copy()
        status, it, entering = mod.simplex_iterate(T, basis, ncols, 10**6, 1e-9)
        results.append((status, it, entering, T, basis))
    (s1, i1, e1, T1, b1), (s2, i2, e2, T2, b2) = results
    assert (s1, i1, e1) == (s2, i2, e2)
    assert np.array_equal(b1, b2)
    assert np.allclose(T1, T2, rtol=0, atol=1e-12)


def test_simplex_iteration_cap():
    T, basis, ncols = _random_tableau(np.random.default_rng(0))
    T[-1, :6] = -1.0
    status, it, _ = _pykernels.simplex_iterate(T, basis, ncols, 0, 1e-9)
    assert status == _pykernels.ITERATION_LIMIT and it == 0

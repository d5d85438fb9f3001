import numpy as np
import pytest
from hypothesis import given, strategies as st

from convextime.errors import UnsupportedError
from convextime.fixtures import dynamics_fixtures
from convextime.gauge import (
    cstar_contains, gauge, gauge_batch, gauge_continuity_modulus, gauge_subdiff_contains,
    sstar_contains,
)
from convextime.geometry import Ball, HPolyhedron, VPolytope, box, polar
from convextime.oracle import gauge_bisect

from strategies import dynamics, vectors

BOX = box([-1, -1], [1, 1])
SLAB = HPolyhedron([[1, 0], [0, 1], [0, -1]], [1, 1, 1])
DISC = Ball([0, 0], 1)


class TestValues:
    def test_examples(self):
        g = gauge(BOX, [3, -2])
        assert g.value == 3.0 and g.witness == (0,)
        assert gauge(Ball([0, 0], 2), [3, 4]).value == 2.5
        assert gauge(BOX, [0, 0]).value == 0.0

    def test_horizon_direction(self):
        g = gauge(SLAB, [-7, 0])
        assert g.value == 0.0 and g.horizon

    def test_vpolytope_lp(self):
        tri = dynamics_fixtures()["triangle"]
        g = gauge(tri, [1, 1])
        lam, _ = g.witness
        assert g.value == pytest.approx(float(lam.sum()))
        assert g.value == pytest.approx(gauge_bisect(tri, [1, 1]), abs=1e-9)

    def test_vpolytope_with_ray_horizon(self):
        F = VPolytope([[1, 1], [1, -1], [-1, 1], [-1, -1]], rays=[[1, 0]])
        g = gauge(F, [5, 0])
        assert g.value == 0.0 and g.horizon

    def test_off_center_ball_unsupported(self):
        with pytest.raises(UnsupportedError):
            gauge(Ball([0.1, 0], 1), [1, 0])

    @pytest.mark.parametrize("name", ["box", "ball1", "ball2", "triangle", "slab"])
    def test_batch_matches_scalar(self, name, rng):
        F = dynamics_fixtures()[name]
        X = rng.uniform(-4, 4, (40, 2))
        assert np.allclose(gauge_batch(F, X), [gauge(F, x).value for x in X], atol=1e-12)


@given(dynamics(), vectors())
def test_matches_bisection(F, x):
    assert gauge(F, x).value == pytest.approx(gauge_bisect(F, x), abs=1e-8 * max(1, np.abs(x).max()))


@given(dynamics(), vectors(), st.floats(0.0, 50.0))
def test_positive_homogeneity(F, x, lam):
    assert gauge(F, lam * x).value == pytest.approx(lam * gauge(F, x).value, rel=1e-9, abs=1e-12)


@given(dynamics(), vectors(), vectors())
def test_subadditive(F, x, y):
    assert gauge(F, x + y).value <= gauge(F, x).value + gauge(F, y).value + 1e-9


@given(dynamics(), vectors(), vectors())
def test_lipschitz_with_polar_norm(F, x, y):
    L = gauge_continuity_modulus(F)
    assert abs(gauge(F, x).value - gauge(F, y).value) <= L * np.linalg.norm(x - y) + 1e-9


@given(dynamics(), vectors())
def test_unit_sublevel_is_F(F, x):
    g = gauge(F, x).value
    if abs(g - 1) > 1e-9:
        assert (g < 1) == F.contains(x, 0.0)


class TestSubdiff:
    def test_examples(self):
        assert gauge_subdiff_contains(BOX, [3, -2], [1, 0])
        assert not gauge_subdiff_contains(BOX, [3, -2], [0, -1])
        # at the origin the subdifferential is the polar
        assert gauge_subdiff_contains(BOX, [0, 0], [0.5, -0.5])
        assert not gauge_subdiff_contains(BOX, [0, 0], [1.1, 0])

    @given(dynamics(), vectors(), vectors())
    def test_accepted_satisfy_inequality(self, F, x, y):
        # the polar vertex achieving the max is always a subgradient
        P = polar(F)
        if isinstance(P, Ball):
            v = x / max(np.linalg.norm(x), 1e-300) * P.radius
        else:
            V = P.vrep.vertices if hasattr(P, "vrep") else P.vertices
            v = V[int(np.argmax(V @ x))]
        if gauge_subdiff_contains(F, x, v):
            assert gauge(F, y).value >= gauge(F, x).value + v @ (y - x) - 1e-8


class TestPolarSets:
    def test_cstar(self):
        assert cstar_contains(DISC, [0.5, 0.5])
        assert cstar_contains(BOX, [0, 0])
        assert not cstar_contains(BOX, [1.2, 0])

    def test_sstar(self):
        assert sstar_contains(DISC, [1, 0])
        assert not sstar_contains(DISC, [0.5, 0])
        # sigma_box((-1,-1)) = 2
        assert not sstar_contains(BOX, [1, 1])
        assert sstar_contains(BOX, [0.5, 0.5])

    def test_moduli(self):
        assert gauge_continuity_modulus(Ball([0, 0], 2)) == 0.5
        assert gauge_continuity_modulus(BOX) == 1.0
        F = HPolyhedron([[2, 0], [-2, 0], [0, 1], [0, -1]], [1, 1, 1, 1])
        assert gauge_continuity_modulus(F) == 2.0

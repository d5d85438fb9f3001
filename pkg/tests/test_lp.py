import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from convextime.geometry import Ball, HPolyhedron, VPolytope, box
from convextime.lp import (
    INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, project_halfspaces, project_qp, solve_lp,
)

from strategies import hpolytopes, vectors

BOX = box([-1, -1], [1, 1])


def test_box_corner():
    sol = solve_lp(LinearProgram([-1, -1], BOX.A, BOX.b))
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(-2.0)
    assert_allclose(sol.x, [1, 1])


def test_infeasible():
    sol = solve_lp(LinearProgram([1.0], [[1.0], [-1.0]], [-1.0, -1.0]))
    assert sol.status == INFEASIBLE


def test_unbounded():
    sol = solve_lp(LinearProgram([-1.0], lower=[0.0]))
    assert sol.status == UNBOUNDED


def test_equality_and_bounds():
    # min x + 2y s.t. x + y = 1, x, y >= 0
    sol = solve_lp(LinearProgram([1, 2], A_eq=[[1, 1]], b_eq=[1], lower=[0, 0]))
    assert sol.status == OPTIMAL
    assert_allclose(sol.x, [1, 0], atol=1e-12)


def test_degenerate_vertex_terminates():
    # many constraints through the optimum exercise Bland's rule
    ang = np.linspace(0, np.pi / 2, 9)
    A = np.column_stack([np.cos(ang), np.sin(ang)])
    A = np.vstack([A, -np.eye(2)])
    b = np.r_[np.zeros(9), 1, 1]
    sol = solve_lp(LinearProgram([-1, -1], A, b))
    assert sol.status == OPTIMAL and sol.value == pytest.approx(0.0, abs=1e-12)


@given(hpolytopes(), vectors())
def test_optimum_matches_vertex_enumeration(P, c):
    sol = solve_lp(LinearProgram(c, P.A, P.b))
    assert sol.status == OPTIMAL
    assert np.all(P.A @ sol.x <= P.b + 1e-7)
    assert sol.value == pytest.approx(-P.support(-c), abs=1e-7)


@given(arrays(np.float64, (4, 3), elements=st.floats(-2, 2)),
       arrays(np.float64, 3, elements=st.floats(-2, 2)))
def test_weak_duality(A, c):
    # primal: min c.x, A x <= 1, x >= 0 is always feasible at x = 0
    b = np.ones(4)
    sol = solve_lp(LinearProgram(c, A, b, lower=np.zeros(3)))
    if sol.status == OPTIMAL:
        assert sol.value <= 1e-9
        assert np.all(A @ sol.x <= b + 1e-7) and np.all(sol.x >= -1e-9)
    else:
        assert sol.status == UNBOUNDED
        assert np.all(A @ sol.ray <= 1e-9) and c @ sol.ray < 0


class TestProjection:
    def test_examples(self):
        assert_allclose(project_qp(BOX, [3, 1]), [1, 1])
        assert_allclose(project_qp(BOX, [0.5, 0.5]), [0.5, 0.5])
        assert_allclose(project_qp(HPolyhedron([[1, 0]], [0]), [2, 5]), [0, 5])

    def test_vpolytope(self):
        tri = VPolytope([[0, 0], [1, 0], [0, 1]])
        assert_allclose(project_qp(tri, [1, 1]), [0.5, 0.5])
        assert_allclose(project_qp(tri, [-1, -3]), [0, 0], atol=1e-12)

    @given(hpolytopes(), vectors())
    def test_kkt(self, P, x):
        p = project_halfspaces(P.A, P.b, x)
        assert np.all(P.A @ p <= P.b + 1e-9)
        # x - p is a nonnegative combination of active normals
        act = np.abs(P.A @ p - P.b) <= 1e-8
        r = x - p
        if np.linalg.norm(r) > 1e-9:
            lam, *_ = np.linalg.lstsq(P.A[act].T, r, rcond=None)
            assert_allclose(P.A[act].T @ lam, r, atol=1e-7)
            assert np.all(lam >= -1e-7)

    def test_ball_is_not_polyhedral(self):
        with pytest.raises(TypeError):
            project_qp(Ball([0, 0], 1), [2, 0])

"""Named sets used by the verification suites, the tests and the CLI examples."""

import numpy as np

from .geometry import Ball, HPolyhedron, VPolytope, box

# co{(2,0), (0,2), (-1,-1)}: contains the origin but is not symmetric
TRIANGLE_VERTICES = np.array([[2.0, 0.0], [0.0, 2.0], [-1.0, -1.0]])


def dynamics_fixtures():
    """The five dynamics sets: box, two balls, a triangle and an unbounded slab."""
    return {
        "box": box([-1, -1], [1, 1]),
        "ball1": Ball([0.0, 0.0], 1.0),
        "ball2": Ball([0.0, 0.0], 2.0),
        "triangle": VPolytope(TRIANGLE_VERTICES),
        "slab": slab(),
    }


def slab():
    """``{x1 <= 1, |x2| <= 1}``; its horizon cone is the ray ``{(d, 0) : d <= 0}``."""
    return HPolyhedron([[1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [1.0, 1.0, 1.0])


def target_fixtures():
    """Bounded targets in all three representations."""
    return {
        "box": box([-1, -1], [1, 1]),
        "box_v": VPolytope([[-1, -1], [1, -1], [1, 1], [-1, 1]]),
        "segment": VPolytope([[0.0, 0.0], [1.0, 0.0]]),
        "point": VPolytope([[0.0, 0.0]]),
        "triangle": VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        "disc": Ball([0.5, 0.0], 0.5),
    }


def symmetric_dynamics():
    d = dynamics_fixtures()
    return {k: d[k] for k in ("box", "ball1", "ball2")}


def box_scene():
    """Scene document for the unit box target under Euclidean dynamics."""
    return {
        "omega": {"type": "hpoly", "A": [[1, 0], [0, 1], [-1, 0], [0, -1]], "b": [1, 1, 1, 1]},
        "dynamics": {"type": "ball", "center": [0, 0], "radius": 1},
    }

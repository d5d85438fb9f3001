"""Minimal time, signed minimal time and signed distance over polyhedra and balls.

Each value comes with exact subdifferential membership tests and brute-force
oracles that check them.
"""

from .errors import ConvexTimeError, DimensionError, UnattainedError, UnsupportedError, ValidationError
from .geometry import Ball, HPolyhedron, VPolytope, box, contains, set_from_json, set_to_json, support
from .gauge import GaugeValue, gauge, gauge_batch, gauge_subdiff_contains
from .kernels import BACKEND
from .mintime import (
    ExpansionHandle,
    MinTimeResult,
    eval_mintime,
    f_closure_explicit,
    generalized_projection,
    in_f_closure,
    mintime,
    mintime_subdiff_contains,
    mintime_subdiff_via_projection,
)
from .signed import (
    SignedValue,
    SubdiffDescription,
    eval_mu,
    eval_signed_mintime,
    infconv_eval,
    signed_distance,
    signed_distance_subdiff,
)

__version__ = "0.1.0"


__all__ = [
    "BACKEND",
    "Ball",
    "ConvexTimeError",
    "DimensionError",
    "ExpansionHandle",
    "GaugeValue",
    "HPolyhedron",
    "MinTimeResult",
    "SignedValue",
    "SubdiffDescription",
    "UnattainedError",
    "UnsupportedError",
    "VPolytope",
    "ValidationError",
    "box",
    "contains",
    "eval_mintime",
    "eval_mu",
    "eval_signed_mintime",
    "f_closure_explicit",
    "gauge",
    "gauge_batch",
    "gauge_subdiff_contains",
    "generalized_projection",
    "in_f_closure",
    "infconv_eval",
    "mintime",
    "mintime_subdiff_contains",
    "mintime_subdiff_via_projection",
    "set_from_json",
    "set_to_json",
    "signed_distance",
    "signed_distance_subdiff",
    "support",
]

"""Numerics for matrix convex sets: free spectrahedra, mixed row contractions
and their maximal dilations, extreme-point classifiers for convex bodies, and
matrix ranges."""

from .numkernel import DEFAULT_TOL, ToleranceConfig
from .pencil import HermitianPencil, MatrixTuple, build_mixed_pencil, eval_pencil, spectrahedron_member
from .mixedsets import MixedTuple, dilate_to_maximal, is_maximal, mixed_member, witness_dilation
from .convexbody import (
    EuclideanBall,
    KpBody,
    LqBall,
    Polytope,
    classify_point,
    simplex_bounded,
    standard_position,
    subquadratic_certify,
)
from .matrange import MatrixRangeBody, paraboloid_bound, w1_membership, wmax_membership

__version__ = "0.1.0"

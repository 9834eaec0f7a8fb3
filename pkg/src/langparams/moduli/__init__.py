"""Brute-force study of tame parameter schemes over finite fields."""

from .cohomology import (
    CohomologyResult,
    FiniteAbelian,
    brute_force_cohomology,
    cyclic_cohomology,
    h1_finite,
    stabilized_brute_force,
    structure_from_orders,
)
from .points import (
    BoundsReport,
    InertialClass,
    LElement,
    SL2Result,
    TameParameterPoint,
    check_point_bounds,
    enumerate_pairs,
    enumerate_Z1,
    fiber_over_sigma,
    inertial_classes,
    oracle_points,
    relation_holds,
    sl2_parameter,
    torsor_report,
    twisted_centralizer,
)
from .semidirect import GroupContext, SemidirectData, TwistAut, ad_matrix
from .tangent import LieAlgebra, TangentReport, lie_algebra, tangent_from_operators, tangent_report
from .tori import twisted_torus_orders

__all__ = [
    "BoundsReport", "CohomologyResult", "FiniteAbelian", "GroupContext", "InertialClass", "LElement",
    "LieAlgebra", "SL2Result", "SemidirectData", "TameParameterPoint", "TangentReport", "TwistAut",
    "ad_matrix", "brute_force_cohomology", "check_point_bounds", "cyclic_cohomology", "enumerate_pairs",
    "enumerate_Z1", "fiber_over_sigma", "h1_finite", "inertial_classes", "lie_algebra", "oracle_points",
    "relation_holds", "sl2_parameter", "stabilized_brute_force", "structure_from_orders",
    "tangent_from_operators", "tangent_report", "torsor_report", "twisted_centralizer",
    "twisted_torus_orders",
]

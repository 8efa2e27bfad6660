"""Uniformly convex sets in finite-dimensional l_p spaces: moduli of convexity,
projections, and continuous selections that split sums and linear images."""
from .bodies import ConvexBody, PBall, Polygon, PowerCap, hausdorff_distance, load_body
from .modulus import AnalyticModulus, ModulusTable, estimate_modulus, verify_battery
from .projection import AffineSubspace, a_relative_projection, project_body, project_intersection
from .report import Report
from .splitting import LinearSurjection, split_kernel, split_sum, steiner_point

__version__ = "0.1.0"

__all__ = [
    "AffineSubspace",
    "AnalyticModulus",
    "ConvexBody",
    "LinearSurjection",
    "ModulusTable",
    "PBall",
    "Polygon",
    "PowerCap",
    "Report",
    "a_relative_projection",
    "estimate_modulus",
    "hausdorff_distance",
    "load_body",
    "project_body",
    "project_intersection",
    "split_kernel",
    "split_sum",
    "steiner_point",
    "verify_battery",
]

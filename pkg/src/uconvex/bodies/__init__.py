"""Convex bodies given by oracles, and operations on them."""
from .base import EUCLID, ConvexBody, SupportResult
from .composite import (
    Intersection,
    LinearImage,
    MinkowskiSum,
    Product,
    Scale,
    ScannedBody,
    Slice,
    Symmetrized,
    Translate,
    clip_segment,
    intersect,
    symmetrize,
)
from .io import body_from_dict, body_to_dict, dump_body, load_body
from .metrics import HausdorffResult, boundary_point, diameter, hausdorff_distance, support_point, support_value
from .primitives import BallIntersection, Ellipsoid, PBall, Point, Polygon, Polytope, PowerCap, Segment

__all__ = [
    "EUCLID",
    "BallIntersection",
    "ConvexBody",
    "Ellipsoid",
    "HausdorffResult",
    "Intersection",
    "LinearImage",
    "MinkowskiSum",
    "PBall",
    "Point",
    "Polygon",
    "Polytope",
    "PowerCap",
    "Product",
    "Scale",
    "ScannedBody",
    "Segment",
    "Slice",
    "SupportResult",
    "Symmetrized",
    "Translate",
    "body_from_dict",
    "body_to_dict",
    "boundary_point",
    "clip_segment",
    "diameter",
    "dump_body",
    "hausdorff_distance",
    "intersect",
    "load_body",
    "support_point",
    "support_value",
    "symmetrize",
]

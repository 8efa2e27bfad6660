"""Support queries, boundary access, Hausdorff distance and diameter."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, NoBoundary
from ..norms import SubspaceNorm
from ..sampling import DEFAULT_SAMPLING, SamplingCfg, directions, maximize_on_sphere
from .base import ConvexBody, SupportResult, as_vector
from .composite import LinearImage, Scale, Translate, as_euclidean_ball
from .primitives import PBall, Polytope, Segment


def support_value(body: ConvexBody, u) -> float:
    u = as_vector(u, body.dim, "functional")
    if not np.any(u):
        raise ValueError("functional must be nonzero")
    return body.support_value(u)


def support_point(body: ConvexBody, u) -> SupportResult:
    """Maximizer of ``<u, .>`` over the body, with degeneracy flags.

    A non-point face is reported through ``degenerate`` (and a
    DegenerateFaceWarning); the returned point is then its lexicographically
    smallest extreme point.
    """
    u = as_vector(u, body.dim, "functional")
    if not np.any(u):
        raise ValueError("functional must be nonzero")
    return body.with_flags(u)


def boundary_point(body: ConvexBody, direction, origin=None) -> np.ndarray:
    v = as_vector(direction, body.dim, "direction")
    if not np.any(v):
        raise ValueError("direction must be nonzero")
    c = body.interior_point() if origin is None else as_vector(origin, body.dim, "origin")
    t = float(body.ray_exit(c, v[None, :])[0])
    if not np.isfinite(t):
        raise NoBoundary(f"{body!r} is unbounded along {v}")
    return c + t * v


@dataclass(frozen=True)
class HausdorffResult:
    distance: float
    direction: np.ndarray | None
    method: str
    resolution: float


def _vertex_set(body):
    if isinstance(body, (Segment, Polytope)) and (body.dim == 2 or isinstance(body, Segment)):
        return body.vertices
    return None


def _exact_hausdorff(A, B, norm):
    if not norm.is_euclidean:
        return None
    ba, bb = as_euclidean_ball(A), as_euclidean_ball(B)
    if ba is not None and bb is not None:
        return float(np.linalg.norm(ba.center - bb.center) + abs(ba.radius - bb.radius))
    VA, VB = _vertex_set(A), _vertex_set(B)
    if VA is None or VB is None:
        return None
    # for polytopes the farthest point of one set from the other is a vertex
    da = max(np.linalg.norm(v - B.project(v)) for v in VA)
    db = max(np.linalg.norm(v - A.project(v)) for v in VB)
    return float(max(da, db))


def _same_subspace(A, B) -> bool:
    return (isinstance(A, LinearImage) and isinstance(B, LinearImage) and A.basis.shape == B.basis.shape
            and np.allclose(A.basis, B.basis, atol=1e-14) and np.allclose(A.base, B.base, atol=1e-14))


def hausdorff_distance(
    A: ConvexBody,
    B: ConvexBody,
    cfg: SamplingCfg = DEFAULT_SAMPLING,
    norm=None,
    full_output: bool = False,
):
    """``sup |s(u,A) - s(u,B)|`` over dual-unit functionals u.

    ``norm`` defaults to A's ambient norm and may also be a product norm.
    Pairs of Euclidean balls and of planar polygons or segments are handled
    exactly; otherwise the supremum is taken over the sampling grid and then
    refined locally.  With ``full_output`` a :class:`HausdorffResult` is
    returned instead of the bare distance.
    """
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")
    norm = A.norm if norm is None else norm
    if _same_subspace(A, B):
        # both sets lie in one subspace: measure there, in the restricted norm
        return hausdorff_distance(A.inner, B.inner, cfg, SubspaceNorm(norm, A.basis), full_output)
    exact = _exact_hausdorff(A, B, norm)
    if exact is not None:
        res = HausdorffResult(exact, None, "exact", 0.0)
        return res if full_output else res.distance

    def gap(U):
        return np.abs(A.support_values(U) - B.support_values(U)) / norm.dual_norm(U)

    u, val = maximize_on_sphere(gap, A.dim, cfg)
    res = HausdorffResult(float(val), u / norm.dual_norm(u), "sampled", cfg.resolution(A.dim))
    return res if full_output else res.distance


def _exact_diameter(body, norm):
    if isinstance(body, PBall) and body.norm == norm:
        return 2.0 * body.radius
    if isinstance(body, (Polytope, Segment)):
        V = body.vertices
        D = V[:, None, :] - V[None, :, :]
        return float(np.max(norm.norm(D)))
    if isinstance(body, Translate):
        return _exact_diameter(body.inner, norm)
    if isinstance(body, Scale):
        d = _exact_diameter(body.inner, norm)
        return None if d is None else abs(body.factor) * d
    return None


def diameter(body: ConvexBody, cfg: SamplingCfg = DEFAULT_SAMPLING, norm=None) -> float:
    """``max over dual-unit u of s(u) + s(-u)``; exact for balls and polytopes."""
    norm = body.norm if norm is None else norm
    exact = _exact_diameter(body, norm)
    if exact is not None:
        return exact

    def width(U):
        return (body.support_values(U) + body.support_values(-U)) / norm.dual_norm(U)

    if body.dim == 2:
        # widths are even in u, so half the circle suffices
        U = directions(2, cfg)[: cfg.n_planar // 2]
        return float(maximize_on_sphere(width, 2, cfg, candidates=U)[1])
    return float(maximize_on_sphere(width, body.dim, cfg)[1])

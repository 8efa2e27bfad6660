"""Euclidean metric projections onto bodies, affine subspaces and their intersections."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .bodies import ConvexBody, MinkowskiSum, Scale
from .bodies.base import as_vector
from .errors import (
    DegenerateFaceWarning,
    EmptyIntersectionSuspected,
    GaugeUnbounded,
    NonEuclideanNorm,
    NotConvergedWarning,
    OriginNotInterior,
)
from .norms import NormSpec
from .sampling import DEFAULT_SAMPLING, SamplingCfg, maximize_on_sphere

EUCLID = NormSpec(2.0)


class AffineSubspace:
    """``basepoint + span(basis)``; the basis rows are orthonormalized on input."""

    def __init__(self, basepoint, basis=None, norm: NormSpec = EUCLID):
        self.basepoint = as_vector(basepoint, name="basepoint")
        self.ambient_dim = self.basepoint.size
        B = np.zeros((0, self.ambient_dim)) if basis is None else np.atleast_2d(np.asarray(basis, float))
        if B.size and B.shape[1] != self.ambient_dim:
            raise ValueError("basis vectors must match the basepoint dimension")
        if B.size:
            B = linalg.orth(B.T).T
        self.basis = B.reshape(-1, self.ambient_dim)
        self.norm = norm

    @classmethod
    def from_equations(cls, L, f, norm: NormSpec = EUCLID):
        """``{w : L w = f}``; the basepoint is its least-norm element."""
        L = np.atleast_2d(np.asarray(L, float))
        base = np.linalg.lstsq(L, np.asarray(f, float), rcond=None)[0]
        return cls(base, linalg.null_space(L).T, norm)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, x):
        d = np.asarray(x, float) - self.basepoint
        return self.basepoint + (d @ self.basis.T) @ self.basis

    def distance(self, x) -> float:
        x = np.asarray(x, float)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol=1e-9) -> bool:
        return self.distance(x) <= tol

    def translate(self, v) -> "AffineSubspace":
        return AffineSubspace(self.basepoint + np.asarray(v, float), self.basis, self.norm)

    def __repr__(self):
        return f"AffineSubspace(dim={self.dim}, ambient={self.ambient_dim})"


class ProjectionResult(NamedTuple):
    point: np.ndarray
    distance: float
    iterations: int
    converged: bool
    defect: float = 0.0


def _require_euclidean(norm, what):
    if not getattr(norm, "is_euclidean", False):
        raise NonEuclideanNorm(f"{what} uses a non-Euclidean norm; solvers are Euclidean only")


def project_affine(S: AffineSubspace, x) -> ProjectionResult:
    _require_euclidean(S.norm, "affine subspace")
    x = as_vector(x, S.ambient_dim, "point")
    y = S.project(x)
    return ProjectionResult(y, float(np.linalg.norm(x - y)), 0, True, 0.0)


def _exact_membership(A) -> bool:
    return not isinstance(A, MinkowskiSum)


def project_body(
    A: ConvexBody,
    x,
    tol: float = 1e-8,
    max_iters: int = 100_000,
    step: str = "line_search",
    closed_form: bool = True,
) -> ProjectionResult:
    """Nearest point of A to x by conditional gradients.

    The linear minimization oracle is the body's support point.  Steps use
    exact line search on the quadratic objective (``step="classic"``
    selects the 2/(k+2) schedule).  Iteration stops once the Frank-Wolfe
    gap is at most ``tol``.  Bodies that know their projection in closed
    form skip the iteration unless ``closed_form`` is False.
    """
    _require_euclidean(A.norm, repr(A))
    x = as_vector(x, A.dim, "point")
    if closed_form:
        y = A.project(x)
        if y is not None:
            return ProjectionResult(y, float(np.linalg.norm(x - y)), 0, True, 0.0)
    if _exact_membership(A) and A.contains(x, tol=0.0):
        return ProjectionResult(x.copy(), 0.0, 0, True, 0.0)
    y = A.support_point(x - A.interior_point())
    gap = np.inf
    for k in range(1, max_iters + 1):
        g = y - x
        s = A.support_point(-g)
        d = s - y
        gap = float(-g @ d)
        if gap <= tol:
            return ProjectionResult(y, float(np.linalg.norm(g)), k, True, max(gap, 0.0))
        if step == "classic":
            gamma = 2.0 / (k + 2.0)
        else:
            dd = float(d @ d)
            gamma = min(1.0, gap / dd) if dd > 0 else 0.0
        y = y + gamma * d
    warnings.warn(f"Frank-Wolfe stopped with gap {gap:.3g} after {max_iters} steps", NotConvergedWarning,
                  stacklevel=2)
    return ProjectionResult(y, float(np.linalg.norm(y - x)), max_iters, False, gap)


def projector(A, tol: float = 1e-10):
    """Callable x -> nearest point of A (closed form when available)."""
    if isinstance(A, AffineSubspace):
        return A.project
    outside = A.interior_point() + 3.0 * (A.outer_radius() + 1.0) * np.eye(A.dim)[0]
    if A.project(outside) is not None:
        return A.project
    return lambda x: project_body(A, x, tol=tol).point


def distance_to_body(K: ConvexBody, x, cfg: SamplingCfg = DEFAULT_SAMPLING) -> float:
    """Euclidean distance from x to K from support data alone.

    ``dist(x, K) = max(0, max_{|u|=1} <u, x> - s(u, K))``; on the sphere the
    objective is quasiconcave where positive, so sampling plus local
    refinement finds the maximum.
    """
    x = as_vector(x, K.dim, "point")

    def excess(U):
        return U @ x - K.support_values(U)

    return max(0.0, float(maximize_on_sphere(excess, K.dim, cfg)[1]))


@dataclass
class DykstraResult:
    first: np.ndarray
    second: np.ndarray
    iterations: int
    defect: float
    converged: bool


def dykstra(proj_a, proj_b, x, tol: float = 1e-10, max_iters: int = 50_000,
            stall_window: int | None = 2000):
    """Dykstra's alternating projections for the nearest point of A ∩ B to x.

    Stops when the two iterates are within ``tol`` of each other and the
    B-iterate moved by at most ``tol``.  A defect that stops decreasing
    while still far above ``tol`` raises EmptyIntersectionSuspected;
    callers that certified feasibility beforehand pass
    ``stall_window=None``, since nearly tangent sets also decrease slowly.
    """
    x = np.asarray(x, float)
    b = x.copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    history = []
    a = b
    defect = np.inf
    for k in range(1, max_iters + 1):
        a = proj_a(b + p)
        p = b + p - a
        b_new = proj_b(a + q)
        q = a + q - b_new
        move = float(np.linalg.norm(b_new - b))
        b = b_new
        defect = float(np.linalg.norm(a - b))
        if defect <= tol and move <= tol:
            return DykstraResult(a, b, k, defect, True)
        history.append(defect)
        if stall_window and k % stall_window == 0 and k >= 2 * stall_window:
            old = history[-stall_window]
            # disjoint sets: the defect settles at their (positive) distance
            if defect > 1e-6 and defect > (1.0 - 1e-6) * old:
                raise EmptyIntersectionSuspected(f"feasibility defect stalled at {defect:.3g}")
    if defect > max(1e3 * tol, 1e-6):
        raise EmptyIntersectionSuspected(f"feasibility defect {defect:.3g} after {max_iters} iterations")
    warnings.warn(f"alternating projections stopped with defect {defect:.3g}", NotConvergedWarning, stacklevel=2)
    return DykstraResult(a, b, max_iters, defect, False)


def project_intersection(
    A: ConvexBody,
    S: AffineSubspace,
    x,
    tol: float = 1e-10,
    max_iters: int = 50_000,
) -> ProjectionResult:
    """Nearest point of ``A ∩ S`` to x.

    The returned point lies in S up to rounding; its distance to A is the
    reported ``defect``.
    """
    _require_euclidean(S.norm, "affine subspace")
    _require_euclidean(A.norm, repr(A))
    x = as_vector(x, A.dim, "point")
    res = dykstra(projector(A, tol=tol * 1e-2), S.project, x, tol=tol, max_iters=max_iters)
    y = res.second
    return ProjectionResult(y, float(np.linalg.norm(x - y)), res.iterations, res.converged, res.defect)


def _check_origin_interior(A):
    g = float(A.gauge(np.zeros((1, A.dim)))[0])
    if not g < 1.0 - 1e-9:
        raise OriginNotInterior(f"0 is not interior to {A!r}")


def gauge_distance(
    A: ConvexBody,
    B: ConvexBody,
    c,
    tol: float = 1e-9,
    t_max: float = 1e6,
    cfg: SamplingCfg = DEFAULT_SAMPLING,
    feas_tol: float = 1e-12,
) -> float:
    """``inf{t > 0 : c ∈ B + tA}`` by bisection on t.

    Feasibility of t means ``dist(c, B + tA) <= feas_tol``, the distance
    being evaluated from the support function of the sum; the bracket is
    narrowed to width ``tol`` and its midpoint returned.
    """
    _check_origin_interior(A)
    c = as_vector(c, A.dim, "point")

    def feasible(t):
        K = B if t == 0 else MinkowskiSum(B, Scale(A, t))
        return distance_to_body(K, c, cfg) <= feas_tol

    if feasible(0.0):
        return 0.0
    hi = 1.0
    while not feasible(hi):
        hi *= 2.0
        if hi > t_max:
            raise GaugeUnbounded(f"c is not in B + tA for t <= {t_max:g}")
    lo = 0.0 if hi == 1.0 else hi / 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class RelativeProjection(NamedTuple):
    b: np.ndarray
    a: np.ndarray
    rho: float
    unique: bool


def a_relative_projection(
    A: ConvexBody,
    B: ConvexBody,
    c,
    tol: float = 1e-9,
    cfg: SamplingCfg = DEFAULT_SAMPLING,
) -> RelativeProjection:
    """The point ``b(c) = (c - ρA) ∩ B`` with ρ the A-gauge distance of c to B.

    At the critical scale the sets c - ρA and B touch along the functional
    u* separating c from B + ρA, so ``a(c) = ρ sp_A(u*)`` and
    ``b(c) = c - a(c)``.  ``unique`` is False when A has a flat face in
    direction u* (the touching set can then be a segment).
    """
    c = as_vector(c, A.dim, "point")
    rho = gauge_distance(A, B, c, tol=tol, cfg=cfg)
    if rho == 0.0:
        return RelativeProjection(c.copy(), np.zeros_like(c), 0.0, True)

    def ratio(U):
        return (U @ c - B.support_values(U)) / A.support_values(U)

    u, _ = maximize_on_sphere(ratio, A.dim, cfg)
    unique = A.support_is_unique(u)
    if not unique:
        warnings.warn("A is not strictly convex in the touching direction; b(c) may not be unique",
                      DegenerateFaceWarning, stacklevel=2)
    a = rho * A.support_point(u)
    return RelativeProjection(c - a, a, rho, unique)

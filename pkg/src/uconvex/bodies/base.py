"""Oracle interface shared by every convex body."""
from __future__ import annotations

import warnings
from abc import ABC, abstractmethod
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy import optimize

from ..errors import DegenerateFaceWarning, EmptyIntersection, NonFiniteInput
from ..norms import NormSpec
from ..sampling import GOLDEN, sphere_directions

EUCLID = NormSpec(2.0)

# boundary polygon resolution for bodies without a closed-form support
_SCAN_POINTS_2D = 2048
_SCAN_POINTS_ND = 4096


class SupportResult(NamedTuple):
    point: np.ndarray
    value: float
    degenerate: bool
    approximate: bool


def as_vector(x, dim=None, name="vector") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput(f"{name} has non-finite entries: {x}")
    if dim is not None and x.shape[0] != dim:
        from ..errors import DimensionMismatch

        raise DimensionMismatch(f"{name} has dimension {x.shape[0]}, expected {dim}")
    return x


class ConvexBody(ABC):
    """A compact convex set in R^n given by oracles.

    Subclasses provide membership, the support function and its maximizer,
    an interior point and a bounding radius.  Everything else (boundary
    access, depth, gauges) is derived from :meth:`ray_exit`, which has a
    bisection fallback but is overridden in closed form wherever possible.

    Bodies are immutable; lazily cached data never changes results.
    """

    dim: int
    norm: NormSpec = EUCLID
    #: True when support points come from a numerical search
    approximate_support = False

    # -- required oracles -------------------------------------------------
    @abstractmethod
    def contains(self, x, tol: float = 1e-9) -> bool:
        ...

    @abstractmethod
    def support_values(self, U) -> np.ndarray:
        """s(u, A) for each row u of ``U``."""

    @abstractmethod
    def support_point(self, u) -> np.ndarray:
        ...

    @abstractmethod
    def interior_point(self) -> np.ndarray:
        ...

    @abstractmethod
    def outer_radius(self) -> float:
        """R with A contained in the ambient ball B_R(interior_point())."""

    # -- derived oracles --------------------------------------------------
    def contains_many(self, X, tol: float = 1e-9) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.contains(x, tol) for x in X], dtype=bool)

    def support_value(self, u) -> float:
        return float(self.support_values(np.asarray(u, dtype=float)[None, :])[0])

    def support_points(self, U) -> np.ndarray:
        return np.array([self.support_point(u) for u in np.atleast_2d(U)])

    def support_is_unique(self, u, tol: float = 1e-10) -> bool:
        return True

    def project(self, x):
        """Closed-form Euclidean projection, or None when unavailable."""
        return None

    def ray_exit(self, X, V) -> np.ndarray:
        """Largest t >= 0 with X + t V in the body, row-wise.

        ``X`` has shape (n,) or (m, n) and must lie in the body; ``V`` has
        shape (m, n).  Distances are in units of ``V``.
        """
        X, V = _broadcast_rays(X, V)
        c = self.interior_point()
        vn = np.linalg.norm(V, axis=1)
        hi = (np.linalg.norm(X - c, axis=1) + self.outer_radius() * np.sqrt(self.dim) + 1.0)
        hi = hi / np.where(vn > 0, vn, 1.0)
        lo = np.zeros(len(X))
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            inside = self.contains_many(X + mid[:, None] * V, tol=0.0)
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return np.where(vn > 0, lo, np.inf)

    def gauge(self, X) -> np.ndarray:
        """Minkowski functional about the interior point (1 on the boundary)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        c = self.interior_point()
        V = X - c
        small = np.linalg.norm(V, axis=1) <= 1e-300
        t = self.ray_exit(np.broadcast_to(c, V.shape), np.where(small[:, None], 1.0, V))
        return np.where(small, 0.0, 1.0 / t)

    def boundary_points(self, V, origin=None) -> np.ndarray:
        """Boundary points along rays ``origin + t v`` for rows v of ``V``."""
        V = np.atleast_2d(np.asarray(V, dtype=float))
        c = self.interior_point() if origin is None else np.asarray(origin, dtype=float)
        t = self.ray_exit(np.broadcast_to(c, V.shape), V)
        return c + t[:, None] * V

    @cached_property
    def inner_radius(self) -> float:
        """Depth of the interior point, estimated from sampled directions."""
        from ..modulus import depth

        return depth(self, self.interior_point())

    def with_flags(self, u) -> SupportResult:
        u = as_vector(u, self.dim, "functional")
        pt = self.support_point(u)
        val = self.support_value(u)
        degenerate = not self.support_is_unique(u)
        if degenerate:
            warnings.warn(
                f"support face of {type(self).__name__} in direction {u} is not a point",
                DegenerateFaceWarning,
                stacklevel=3,
            )
        return SupportResult(pt, val, degenerate, self.approximate_support)

    def to_dict(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no JSON form")

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


def _broadcast_rays(X, V):
    V = np.atleast_2d(np.asarray(V, dtype=float))
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = np.broadcast_to(X, V.shape)
    return X, V


def lex_smallest(points: np.ndarray) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    return points[order[0]]


class ScannedSupportMixin:
    """Support oracle from a boundary scan, for bodies with only ray exits.

    In the plane the boundary is parametrized by angle about the interior
    point; a dense polygon locates the maximizer and a vectorized golden
    section refines it.  In higher dimension sampled boundary points seed a
    Nelder-Mead search over ray directions.  Results are flagged approximate.
    """

    approximate_support = True

    @cached_property
    def _scan(self):
        c = self.interior_point()
        if self.dim == 2:
            theta = 2.0 * np.pi * np.arange(_SCAN_POINTS_2D) / _SCAN_POINTS_2D
            D = np.column_stack([np.cos(theta), np.sin(theta)])
        else:
            theta = None
            D = sphere_directions(self.dim, _SCAN_POINTS_ND)
        P = self.boundary_points(D, c)
        return theta, D, P

    def _boundary_at_angle(self, theta):
        c = self.interior_point()
        D = np.column_stack([np.cos(theta), np.sin(theta)])
        t = self.ray_exit(np.broadcast_to(c, D.shape), D)
        return c + t[:, None] * D

    def _scan_support(self, U):
        U = np.atleast_2d(np.asarray(U, dtype=float))
        theta, D, P = self._scan
        k = np.argmax(U @ P.T, axis=1)
        if self.dim == 2:
            h = 2.0 * np.pi / _SCAN_POINTS_2D
            a = theta[k] - h
            b = theta[k] + h

            def F(th):
                return np.einsum("ij,ij->i", U, self._boundary_at_angle(th))

            th = _golden_max_vec(F, a, b)
            pts = self._boundary_at_angle(th)
            vals = np.einsum("ij,ij->i", U, pts)
            base = np.einsum("ij,ij->i", U, P[k])
            better = vals >= base
            pts = np.where(better[:, None], pts, P[k])
            return pts, np.maximum(vals, base)
        pts = np.array([self._refine_nd(u, D[kk]) for u, kk in zip(U, k)])
        return pts, np.einsum("ij,ij->i", U, pts)

    def _refine_nd(self, u, d0):
        c = self.interior_point()
        from ..sampling import _tangent_basis

        B = _tangent_basis(d0)

        def point(z):
            d = d0 + B @ z
            d = d / np.linalg.norm(d)
            return c + self.ray_exit(c, d[None, :])[0] * d

        res = optimize.minimize(
            lambda z: -float(u @ point(z)),
            np.zeros(self.dim - 1),
            method="Nelder-Mead",
            options={"xatol": 1e-11, "fatol": 1e-14, "maxiter": 300 * self.dim,
                     "initial_simplex": np.vstack([np.zeros(self.dim - 1), 0.05 * np.eye(self.dim - 1)])},
        )
        return point(res.x)

    def support_values(self, U):
        return self._scan_support(U)[1]

    def support_point(self, u):
        return self._scan_support(np.asarray(u, dtype=float)[None, :])[0][0]

    def support_points(self, U):
        return self._scan_support(U)[0]

    def support_value(self, u):
        return float(self._scan_support(np.asarray(u, dtype=float)[None, :])[1][0])


def _golden_max_vec(F, a, b, iters: int = 40):
    """Row-wise golden-section maximization; ``F`` maps (m,) to (m,)."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = F(c), F(d)
    for _ in range(iters):
        left = fc >= fd
        # keep [a, d] where the left probe wins, [c, b] otherwise
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - GOLDEN * (b - a)
        new_d = a + GOLDEN * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        probe = np.where(left, c_next, d_next)
        fp = F(probe)
        fc_next = np.where(left, fp, fd)
        fd_next = np.where(left, fc, fp)
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    return 0.5 * (a + b)


def _golden_min_vec(F, a, b, iters: int = 60):
    return _golden_max_vec(lambda x: -F(x), a, b, iters)


def find_interior_point(gauges, start, dim):
    """Point maximizing min_i (1 - gauge_i); raises if the sets do not overlap.

    ``gauges`` is a list of callables mapping (m, n) points to (m,) gauge
    values.  Each 1 - gauge is concave, so the maximization is well posed.
    """

    def neg(x):
        x = x[None, :]
        return -min(1.0 - float(g(x)[0]) for g in gauges)

    x0 = np.asarray(start, dtype=float)
    best = optimize.minimize(neg, x0, method="Nelder-Mead",
                             options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000 * dim})
    for _ in range(2):
        res = optimize.minimize(neg, best.x, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000 * dim})
        if res.fun < best.fun:
            best = res
    margin = -best.fun
    if not margin > 1e-9:
        raise EmptyIntersection(f"intersection is empty or has empty interior (margin {margin:.3g})")
    return best.x, margin

"""Bodies built from other bodies: affine images, products, sums, intersections."""
from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy import optimize

from ..errors import DimensionMismatch, EmptyIntersection, OriginNotInterior
from ..norms import NormSpec
from ..sampling import directions
from .base import (
    EUCLID,
    ConvexBody,
    ScannedSupportMixin,
    _broadcast_rays,
    as_vector,
    find_interior_point,
)
from .primitives import BallIntersection, PBall, Point, Segment


def _same_space(bodies):
    dims = {b.dim for b in bodies}
    if len(dims) != 1:
        raise DimensionMismatch(f"bodies live in different dimensions: {sorted(dims)}")
    return dims.pop()


class Translate(ConvexBody):
    """``A + offset``."""

    def __init__(self, inner: ConvexBody, offset):
        self.inner = inner
        self.offset = as_vector(offset, inner.dim, "offset")
        self.dim = inner.dim
        self.norm = inner.norm
        self.approximate_support = inner.approximate_support

    def contains(self, x, tol=1e-9):
        return self.inner.contains(np.asarray(x, float) - self.offset, tol)

    def contains_many(self, X, tol=1e-9):
        return self.inner.contains_many(np.atleast_2d(X) - self.offset, tol)

    def support_values(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        return self.inner.support_values(U) + U @ self.offset

    def support_point(self, u):
        return self.inner.support_point(u) + self.offset

    def support_points(self, U):
        return self.inner.support_points(U) + self.offset

    def support_is_unique(self, u, tol=1e-10):
        return self.inner.support_is_unique(u, tol)

    def interior_point(self):
        return self.inner.interior_point() + self.offset

    def outer_radius(self):
        return self.inner.outer_radius()

    @property
    def inner_radius(self):
        return self.inner.inner_radius

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        return self.inner.ray_exit(X - self.offset, V)

    def project(self, x):
        y = self.inner.project(np.asarray(x, float) - self.offset)
        return None if y is None else y + self.offset

    def to_dict(self):
        return {"type": "translate", "inner": self.inner.to_dict(), "offset": self.offset.tolist()}

    def __repr__(self):
        return f"Translate({self.inner!r}, {self.offset.tolist()})"


class Scale(ConvexBody):
    """``factor * A`` (factor may be negative: -1 gives the reflection -A)."""

    def __init__(self, inner: ConvexBody, factor: float):
        self.inner = inner
        self.factor = float(factor)
        if self.factor == 0:
            raise ValueError("scale factor must be nonzero")
        self.dim = inner.dim
        self.norm = inner.norm
        self.approximate_support = inner.approximate_support

    def contains(self, x, tol=1e-9):
        return self.inner.contains(np.asarray(x, float) / self.factor, tol / abs(self.factor))

    def contains_many(self, X, tol=1e-9):
        return self.inner.contains_many(np.atleast_2d(X) / self.factor, tol / abs(self.factor))

    def support_values(self, U):
        return self.inner.support_values(self.factor * np.atleast_2d(np.asarray(U, float)))

    def support_point(self, u):
        return self.factor * self.inner.support_point(self.factor * np.asarray(u, float))

    def support_points(self, U):
        return self.factor * self.inner.support_points(self.factor * np.atleast_2d(U))

    def support_is_unique(self, u, tol=1e-10):
        return self.inner.support_is_unique(self.factor * np.asarray(u, float), tol)

    def interior_point(self):
        return self.factor * self.inner.interior_point()

    def outer_radius(self):
        return abs(self.factor) * self.inner.outer_radius()

    @property
    def inner_radius(self):
        return abs(self.factor) * self.inner.inner_radius

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        return self.inner.ray_exit(X / self.factor, V / self.factor)

    def project(self, x):
        y = self.inner.project(np.asarray(x, float) / self.factor)
        return None if y is None else self.factor * y

    def to_dict(self):
        return {"type": "scale", "inner": self.inner.to_dict(), "factor": self.factor}

    def __repr__(self):
        return f"Scale({self.inner!r}, {self.factor})"


class Product(ConvexBody):
    """``A x B`` in R^{n1+n2}; the ambient norm is Euclidean on the product."""

    def __init__(self, first: ConvexBody, second: ConvexBody):
        self.first, self.second = first, second
        self.n1, self.n2 = first.dim, second.dim
        self.dim = self.n1 + self.n2
        self.norm = EUCLID
        self.approximate_support = first.approximate_support or second.approximate_support

    def _split(self, X):
        X = np.asarray(X, float)
        return X[..., : self.n1], X[..., self.n1 :]

    def contains(self, x, tol=1e-9):
        u, v = self._split(x)
        return self.first.contains(u, tol) and self.second.contains(v, tol)

    def contains_many(self, X, tol=1e-9):
        U, V = self._split(np.atleast_2d(X))
        return self.first.contains_many(U, tol) & self.second.contains_many(V, tol)

    def support_values(self, W):
        U, V = self._split(np.atleast_2d(W))
        return self.first.support_values(U) + self.second.support_values(V)

    def support_point(self, w):
        u, v = self._split(w)
        return np.concatenate([self.first.support_point(u), self.second.support_point(v)])

    def support_points(self, W):
        U, V = self._split(np.atleast_2d(W))
        return np.hstack([self.first.support_points(U), self.second.support_points(V)])

    def support_is_unique(self, w, tol=1e-10):
        u, v = self._split(w)
        # a zero block leaves a whole factor as the face
        ok1 = np.any(u != 0) and self.first.support_is_unique(u, tol)
        ok2 = np.any(v != 0) and self.second.support_is_unique(v, tol)
        return bool(ok1 and ok2)

    def interior_point(self):
        return np.concatenate([self.first.interior_point(), self.second.interior_point()])

    def outer_radius(self):
        return float(np.hypot(self.first.outer_radius(), self.second.outer_radius()))

    @property
    def inner_radius(self):
        return min(self.first.inner_radius, self.second.inner_radius)

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        X1, X2 = self._split(X)
        V1, V2 = self._split(V)
        t1 = np.where(np.any(V1 != 0, axis=1), self.first.ray_exit(X1, np.where(np.any(V1 != 0, axis=1)[:, None], V1, 1.0)), np.inf)
        t2 = np.where(np.any(V2 != 0, axis=1), self.second.ray_exit(X2, np.where(np.any(V2 != 0, axis=1)[:, None], V2, 1.0)), np.inf)
        return np.minimum(t1, t2)

    def project(self, x):
        u, v = self._split(x)
        a, b = self.first.project(u), self.second.project(v)
        if a is None or b is None:
            return None
        return np.concatenate([a, b])

    def to_dict(self):
        return {"type": "product", "parts": [self.first.to_dict(), self.second.to_dict()]}

    def __repr__(self):
        return f"Product({self.first!r}, {self.second!r})"


class MinkowskiSum(ConvexBody):
    """``A_1 + ... + A_k``.

    Support data is exact (sums of the parts').  Membership is tested
    against the supporting halfplanes on the direction grid, an outer
    approximation whose slack is below ``outer_radius * resolution^2 / 8``.
    """

    def __init__(self, *parts: ConvexBody):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        if not parts:
            raise ValueError("need at least one summand")
        self.parts = tuple(parts)
        self.dim = _same_space(parts)
        self.norm = parts[0].norm
        self.approximate_support = any(p.approximate_support for p in parts)

    @cached_property
    def _halfplanes(self):
        U = directions(self.dim)
        return U, self.support_values(U)

    def contains(self, x, tol=1e-9):
        return bool(self.contains_many(np.asarray(x, float)[None, :], tol)[0])

    def contains_many(self, X, tol=1e-9):
        U, S = self._halfplanes
        X = np.atleast_2d(np.asarray(X, float))
        out = np.empty(len(X), bool)
        for i in range(0, len(X), 256):
            out[i : i + 256] = np.max(X[i : i + 256] @ U.T - S, axis=1) <= tol
        return out

    def support_values(self, U):
        return np.sum([p.support_values(U) for p in self.parts], axis=0)

    def support_point(self, u):
        return np.sum([p.support_point(u) for p in self.parts], axis=0)

    def support_points(self, U):
        return np.sum([p.support_points(U) for p in self.parts], axis=0)

    def support_is_unique(self, u, tol=1e-10):
        return all(p.support_is_unique(u, tol) for p in self.parts)

    def interior_point(self):
        return np.sum([p.interior_point() for p in self.parts], axis=0)

    def outer_radius(self):
        return float(sum(p.outer_radius() for p in self.parts))

    def project(self, x):
        return None

    def to_dict(self):
        return {"type": "minkowski_sum", "parts": [p.to_dict() for p in self.parts]}

    def __repr__(self):
        return f"MinkowskiSum({', '.join(map(repr, self.parts))})"


class Intersection(ScannedSupportMixin, ConvexBody):
    """``A_1 ∩ ... ∩ A_k`` for full-dimensional parts with a common interior point.

    Membership is the conjunction and ray exits the minimum over parts;
    support data comes from the boundary scan and is flagged approximate.
    """

    def __init__(self, *parts: ConvexBody, interior=None):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        self.parts = tuple(parts)
        self.dim = _same_space(parts)
        self.norm = parts[0].norm
        if interior is None:
            start = np.mean([p.interior_point() for p in parts], axis=0)
            interior, _ = find_interior_point([p.gauge for p in parts], start, self.dim)
        self._interior = np.asarray(interior, float)

    def contains(self, x, tol=1e-9):
        return all(p.contains(x, tol) for p in self.parts)

    def contains_many(self, X, tol=1e-9):
        out = np.ones(len(np.atleast_2d(X)), bool)
        for p in self.parts:
            out &= p.contains_many(X, tol)
        return out

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        return np.min([p.ray_exit(X, V) for p in self.parts], axis=0)

    def interior_point(self):
        return self._interior.copy()

    def outer_radius(self):
        c = self._interior
        return float(min(p.outer_radius() + p.norm.norm(p.interior_point() - c) for p in self.parts))

    def to_dict(self):
        return {"type": "intersection", "parts": [p.to_dict() for p in self.parts]}

    def __repr__(self):
        return f"Intersection({', '.join(map(repr, self.parts))})"


class Symmetrized(Intersection):
    """``A ∩ (-A)`` for a body with the origin in its interior."""

    def __init__(self, inner: ConvexBody, margin: float = 1e-9):
        g = float(inner.gauge(np.zeros((1, inner.dim)))[0])
        if not g < 1.0 - margin:
            raise OriginNotInterior(f"origin is not interior to {inner!r} (gauge {g:.6g})")
        self.inner = inner
        super().__init__(inner, Scale(inner, -1.0), interior=np.zeros(inner.dim))

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, float)
        return self.inner.contains(x, tol) and self.inner.contains(-x, tol)

    def contains_many(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, float))
        return self.inner.contains_many(X, tol) & self.inner.contains_many(-X, tol)

    def to_dict(self):
        return {"type": "symmetrized", "inner": self.inner.to_dict()}

    def __repr__(self):
        return f"Symmetrized({self.inner!r})"


class Slice(ScannedSupportMixin, ConvexBody):
    """Coordinates of ``A ∩ (base + span(basis))`` in the orthonormal ``basis``.

    The result is a body in R^k (k = number of basis vectors) whose points
    ``y`` correspond to ``base + basis @ y`` in the ambient space.
    """

    def __init__(self, body: ConvexBody, base, basis, interior=None):
        self.body = body
        self.base = as_vector(base, body.dim, "base")
        self.basis = np.asarray(basis, float).reshape(body.dim, -1)
        self.dim = self.basis.shape[1]
        self.norm = EUCLID
        if interior is None:
            start = self.basis.T @ (body.interior_point() - self.base)
            interior, _ = find_interior_point(
                [lambda Y: body.gauge(self.lift(Y))], start, self.dim
            )
        self._interior = np.asarray(interior, float)

    def lift(self, Y):
        return self.base + np.atleast_2d(Y) @ self.basis.T

    def contains(self, y, tol=1e-9):
        return bool(self.body.contains_many(self.lift(y), tol)[0])

    def contains_many(self, Y, tol=1e-9):
        return self.body.contains_many(self.lift(Y), tol)

    def ray_exit(self, Y, V):
        Y, V = _broadcast_rays(Y, V)
        return self.body.ray_exit(self.lift(Y), V @ self.basis.T)

    def interior_point(self):
        return self._interior.copy()

    def outer_radius(self):
        return self.body.outer_radius() * np.sqrt(self.body.dim)


class LinearImage(ConvexBody):
    """``base + basis @ G`` for a body G in coordinates of an orthonormal basis.

    Used for sets that live in a proper affine subspace of the ambient space
    (so have empty interior there); only support and membership are exact.
    """

    def __init__(self, inner: ConvexBody, basis, base=None):
        self.inner = inner
        self.basis = np.asarray(basis, float).reshape(-1, inner.dim)
        self.dim = self.basis.shape[0]
        self.base = np.zeros(self.dim) if base is None else as_vector(base, self.dim, "base")
        self.norm = EUCLID
        self.approximate_support = inner.approximate_support

    @classmethod
    def from_slice(cls, s: Slice):
        return cls(s, s.basis, s.base)

    def contains(self, x, tol=1e-9):
        return bool(self.contains_many(np.asarray(x, float)[None, :], tol)[0])

    def contains_many(self, X, tol=1e-9):
        D = np.atleast_2d(X) - self.base
        Y = D @ self.basis
        off = np.linalg.norm(D - Y @ self.basis.T, axis=1)
        return (off <= tol) & self.inner.contains_many(Y, tol)

    def support_values(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        return U @ self.base + self.inner.support_values(U @ self.basis)

    def support_point(self, u):
        return self.base + self.basis @ self.inner.support_point(self.basis.T @ np.asarray(u, float))

    def support_points(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        return self.base + self.inner.support_points(U @ self.basis) @ self.basis.T

    def interior_point(self):
        return self.base + self.basis @ self.inner.interior_point()

    def outer_radius(self):
        return self.inner.outer_radius()

    @property
    def inner_radius(self):
        return 0.0

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        return np.zeros(len(X))


def clip_segment(body: ConvexBody, seg: Segment, samples: int = 513) -> Segment:
    """``body ∩ seg`` as a segment (or point).

    The body's gauge is convex along the segment; its minimizer locates a
    point of the intersection, and ray exits from there give the endpoints.
    """
    if body.dim != seg.dim:
        raise DimensionMismatch("segment and body dimensions differ")
    d = seg.b - seg.a
    if not np.any(d):
        if body.contains(seg.a):
            return Point(seg.a, p=seg.norm.p)
        raise EmptyIntersection(f"{seg!r} misses {body!r}")
    lam = np.linspace(0.0, 1.0, samples)
    g = body.gauge(seg.a + lam[:, None] * d)
    k = int(np.argmin(g))
    h = 1.0 / (samples - 1)
    res = optimize.minimize_scalar(
        lambda s: float(body.gauge((seg.a + s * d)[None, :])[0]),
        bounds=(max(lam[k] - h, 0.0), min(lam[k] + h, 1.0)),
        method="bounded",
        options={"xatol": 1e-13},
    )
    s0, g0 = (res.x, res.fun) if res.fun < g[k] else (lam[k], g[k])
    if g0 > 1.0 + 1e-12:
        raise EmptyIntersection(f"{seg!r} misses {body!r} (gauge {g0:.6g})")
    x0 = seg.a + s0 * d
    if g0 >= 1.0:
        return Point(x0, p=seg.norm.p)
    t_fwd = body.ray_exit(x0, d[None, :])[0]
    t_bwd = body.ray_exit(x0, -d[None, :])[0]
    hi = min(s0 + t_fwd, 1.0)
    lo = max(s0 - t_bwd, 0.0)
    return Segment(seg.a + lo * d, seg.a + hi * d, p=seg.norm.p)


def intersect(*bodies: ConvexBody, interior=None) -> ConvexBody:
    """Intersection of bodies; a segment factor is clipped in closed form."""
    segs = [b for b in bodies if isinstance(b, Segment)]
    rest = [b for b in bodies if not isinstance(b, Segment)]
    if segs:
        if len(segs) > 1:
            raise NotImplementedError("intersection of several segments")
        out = segs[0]
        for b in rest:
            out = clip_segment(b, out)
        return out
    if len(rest) == 1:
        return rest[0]
    balls = [as_euclidean_ball(b) for b in rest]
    if all(b is not None for b in balls) and all(b.radius == balls[0].radius for b in balls):
        return BallIntersection(balls[0].radius, [b.center for b in balls])
    return Intersection(*rest, interior=interior)


def as_euclidean_ball(body: ConvexBody) -> PBall | None:
    """The Euclidean ball a (translated, scaled) body is, or None."""
    if isinstance(body, PBall):
        return body if body.norm.is_euclidean else None
    if isinstance(body, Translate):
        b = as_euclidean_ball(body.inner)
        return None if b is None else PBall(b.center + body.offset, b.radius)
    if isinstance(body, Scale) and body.factor != 0:
        b = as_euclidean_ball(body.inner)
        return None if b is None else PBall(body.factor * b.center, abs(body.factor) * b.radius)
    return None


def symmetrize(body: ConvexBody, margin: float = 1e-9) -> Symmetrized:
    """``A ∩ (-A)``; raises OriginNotInterior unless 0 is interior to A."""
    return Symmetrized(body, margin)


class ScannedBody(ScannedSupportMixin, ConvexBody):
    """Adapter turning membership + ray-exit callables into a body."""

    def __init__(self, dim, contains_many, ray_exit, interior, outer_radius, norm: NormSpec = EUCLID):
        self.dim = dim
        self.norm = norm
        self._contains_many = contains_many
        self._ray_exit = ray_exit
        self._interior = np.asarray(interior, float)
        self._outer = float(outer_radius)

    def contains(self, x, tol=1e-9):
        return bool(self._contains_many(np.asarray(x, float)[None, :], tol)[0])

    def contains_many(self, X, tol=1e-9):
        return self._contains_many(np.atleast_2d(X), tol)

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        return self._ray_exit(X, V)

    def interior_point(self):
        return self._interior.copy()

    def outer_radius(self):
        return self._outer

"""Convex bodies with closed-form (or nearly closed-form) oracles."""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize
from scipy.spatial import ConvexHull, QhullError

from ..errors import EmptyIntersection
from ..norms import NormSpec
from .base import ConvexBody, ScannedSupportMixin, _broadcast_rays, as_vector, lex_smallest


def _ball_exit(X, V, center, radius):
    """Exit time of rays X + tV from the Euclidean ball B_radius(center)."""
    W = X - center
    a = np.einsum("ij,ij->i", V, V)
    b = np.einsum("ij,ij->i", W, V)
    c = np.einsum("ij,ij->i", W, W) - radius * radius
    disc = np.maximum(b * b - a * c, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (-b + np.sqrt(disc)) / a
    return np.where(a > 0, np.maximum(t, 0.0), np.inf)


class PBall(ConvexBody):
    """Closed l_p ball ``{x : ||x - center||_p <= radius}``."""

    def __init__(self, center, radius: float, p: float = 2.0):
        self.center = as_vector(center, name="center")
        self.radius = float(radius)
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        self.dim = self.center.size
        self.norm = NormSpec(p)

    def contains(self, x, tol=1e-9):
        return bool(self.norm.norm(np.asarray(x, float) - self.center) <= self.radius + tol)

    def contains_many(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, float))
        return self.norm.norm(X - self.center) <= self.radius + tol

    def support_values(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        return U @ self.center + self.radius * self.norm.dual_norm(U)

    def support_point(self, u):
        return self.center + self.radius * self.norm.dual_maximizer(np.asarray(u, float))

    def support_is_unique(self, u, tol=1e-10):
        return self.norm.dual_maximizer_is_unique(u, tol)

    def interior_point(self):
        return self.center.copy()

    def outer_radius(self):
        return self.radius

    @property
    def inner_radius(self):
        return self.radius

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        if self.norm.is_euclidean:
            return _ball_exit(X, V, self.center, self.radius)
        # ||x + tv - c||_p is convex in t: bisect on the level set
        vn = self.norm.norm(V)
        hi = (self.norm.norm(X - self.center) + self.radius) / np.where(vn > 0, vn, 1.0)
        lo = np.zeros(len(X))
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            inside = self.norm.norm(X + mid[:, None] * V - self.center) <= self.radius
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return np.where(vn > 0, lo, np.inf)

    def project(self, x):
        if not self.norm.is_euclidean:
            return None
        d = np.asarray(x, float) - self.center
        r = np.linalg.norm(d)
        if r <= self.radius:
            return np.asarray(x, float).copy()
        return self.center + d * (self.radius / r)

    def to_dict(self):
        return {"type": "pball", "center": self.center.tolist(), "radius": self.radius}

    def __repr__(self):
        return f"PBall(center={self.center.tolist()}, radius={self.radius}, p={self.norm.p})"


class Ellipsoid(ConvexBody):
    """Euclidean ellipsoid ``center + S B_1(0)`` for an invertible matrix S."""

    def __init__(self, center, shape):
        self.center = as_vector(center, name="center")
        self.dim = self.center.size
        self.shape = np.asarray(shape, float).reshape(self.dim, self.dim)
        self._inv = np.linalg.inv(self.shape)
        U, sig, _ = np.linalg.svd(self.shape)
        self._axes_frame, self._semi = U, sig

    @classmethod
    def ellipse(cls, center, semi_axes, angle=0.0):
        c, s = math.cos(angle), math.sin(angle)
        R = np.array([[c, -s], [s, c]])
        return cls(center, R @ np.diag(np.asarray(semi_axes, float)))

    def contains(self, x, tol=1e-9):
        return bool(self.contains_many(np.asarray(x, float)[None, :], tol)[0])

    def contains_many(self, X, tol=1e-9):
        Y = (np.atleast_2d(np.asarray(X, float)) - self.center) @ self._inv.T
        # tol is a Euclidean slack: scale by the shortest semi-axis
        return np.linalg.norm(Y, axis=1) <= 1.0 + tol / self._semi.min()

    def support_values(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        return U @ self.center + np.linalg.norm(U @ self.shape, axis=1)

    def support_point(self, u):
        u = np.asarray(u, float)
        w = self.shape.T @ u
        return self.center + self.shape @ (w / np.linalg.norm(w))

    def interior_point(self):
        return self.center.copy()

    def outer_radius(self):
        return float(self._semi.max())

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        W = (X - self.center) @ self._inv.T
        Z = V @ self._inv.T
        return _ball_exit(W, Z, np.zeros(self.dim), 1.0)

    def project(self, x):
        x = np.asarray(x, float)
        y = self._axes_frame.T @ (x - self.center)
        s = self._semi
        def excess(lam):
            return np.sum((s * y / (s * s + lam)) ** 2) - 1.0

        # the second test catches boundary points where rounding flips the sign
        if np.sum((y / s) ** 2) <= 1.0 or excess(0.0) <= 0.0:
            return x.copy()

        hi = float(np.max(s) * np.linalg.norm(y)) + 1.0
        lam = optimize.brentq(excess, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
        w = s * s * y / (s * s + lam)
        return self.center + self._axes_frame @ w

    def to_dict(self):
        return {"type": "ellipsoid", "center": self.center.tolist(), "shape": self.shape.tolist()}


class BallIntersection(ScannedSupportMixin, ConvexBody):
    """Strongly convex set: intersection of Euclidean balls of common radius R."""

    def __init__(self, R: float, centers):
        self.R = float(R)
        self.centers = np.atleast_2d(np.asarray(centers, float))
        self.dim = self.centers.shape[1]
        self.approximate_support = self.dim != 2
        # minimax center: inner radius = R - (radius of smallest ball holding the centers)
        x0 = self.centers.mean(axis=0)

        def spread(x):
            return np.max(np.linalg.norm(self.centers - x, axis=1))

        res = optimize.minimize(spread, x0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        x = res.x if res.fun < spread(x0) else x0
        if not spread(x) < self.R:
            raise EmptyIntersection("balls have no common interior point")
        self._center = x
        self._inner = self.R - spread(x)

    def contains(self, x, tol=1e-9):
        return bool(self.contains_many(np.asarray(x, float)[None, :], tol)[0])

    def contains_many(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, float))
        d = np.linalg.norm(X[:, None, :] - self.centers[None], axis=2)
        return np.all(d <= self.R + tol, axis=1)

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        return np.min([_ball_exit(X, V, c, self.R) for c in self.centers], axis=0)

    def interior_point(self):
        return self._center.copy()

    def outer_radius(self):
        return self.R

    @property
    def inner_radius(self):
        return self._inner

    def _candidates_2d(self):
        pts = []
        C = self.centers
        for i in range(len(C)):
            for j in range(i + 1, len(C)):
                d = C[j] - C[i]
                L = np.linalg.norm(d)
                if L == 0 or L > 2 * self.R:
                    continue
                m = C[i] + d / 2
                h = math.sqrt(max(self.R**2 - (L / 2) ** 2, 0.0))
                n = np.array([-d[1], d[0]]) / L
                pts.extend([m + h * n, m - h * n])
        if not pts:
            return np.empty((0, 2))
        P = np.array(pts)
        return P[self.contains_many(P, tol=1e-10)]

    def _support_2d(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        un = np.linalg.norm(U, axis=1, keepdims=True)
        cand = self._candidates_2d()
        best_v = np.full(len(U), -np.inf)
        best_p = np.zeros_like(U)
        # support points of single balls that lie in every other ball
        for c in self.centers:
            P = c + self.R * U / un
            ok = self.contains_many(P, tol=1e-10)
            v = np.einsum("ij,ij->i", U, P)
            take = ok & (v > best_v)
            best_v = np.where(take, v, best_v)
            best_p = np.where(take[:, None], P, best_p)
        if len(cand):
            vals = U @ cand.T
            k = np.argmax(vals, axis=1)
            v = vals[np.arange(len(U)), k]
            take = v > best_v
            best_v = np.where(take, v, best_v)
            best_p = np.where(take[:, None], cand[k], best_p)
        return best_p, best_v

    def support_values(self, U):
        if self.dim == 2:
            return self._support_2d(U)[1]
        return super().support_values(U)

    def support_point(self, u):
        if self.dim == 2:
            return self._support_2d(np.asarray(u, float)[None, :])[0][0]
        return super().support_point(u)

    def support_points(self, U):
        if self.dim == 2:
            return self._support_2d(U)[0]
        return super().support_points(U)

    def support_value(self, u):
        return float(self.support_values(np.asarray(u, float)[None, :])[0])

    def to_dict(self):
        return {"type": "ball_intersection", "R": self.R, "centers": self.centers.tolist()}


class PowerCap(ConvexBody):
    """``{x2 >= |x1|^p} ∩ B_1(0)`` in the Euclidean plane, p >= 2."""

    def __init__(self, p: float = 2.0):
        self.p = float(p)
        if self.p < 1.0:
            raise ValueError("exponent must be >= 1")
        self.dim = 2
        # corner where the curve x2 = |x1|^p meets the unit circle
        self.corner = optimize.brentq(lambda s: s * s + s ** (2 * self.p) - 1.0, 0.0, 1.0, xtol=1e-16)

    def _curve_gap(self, X):
        return X[:, 1] - np.abs(X[:, 0]) ** self.p

    def contains(self, x, tol=1e-9):
        return bool(self.contains_many(np.asarray(x, float)[None, :], tol)[0])

    def contains_many(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, float))
        return (np.linalg.norm(X, axis=1) <= 1.0 + tol) & (self._curve_gap(X) >= -tol)

    def support_values(self, U):
        return np.einsum("ij,ij->i", np.atleast_2d(U), self.support_points(U))

    def support_points(self, U):
        U = np.atleast_2d(np.asarray(U, float))
        a, p = self.corner, self.p
        cands = []
        # unit-circle maximizer when it lies above the curve
        circ = U / np.linalg.norm(U, axis=1, keepdims=True)
        cands.append((circ, self._curve_gap(circ) >= -1e-15))
        # the two corners
        for s in (-1.0, 1.0):
            P = np.tile([s * a, a**p], (len(U), 1))
            cands.append((P, np.ones(len(U), bool)))
        # stationary point of u1 x + u2 |x|^p on the curve (needs u2 < 0)
        u1, u2 = U[:, 0], U[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (np.abs(u1) / (-u2 * p)) ** (1.0 / (p - 1.0)) if p > 1 else np.zeros_like(u1)
        r = np.where(u2 < 0, np.minimum(np.nan_to_num(r, nan=0.0, posinf=a), a), 0.0)
        x1 = np.sign(u1) * r
        P = np.column_stack([x1, np.abs(x1) ** p])
        cands.append((P, u2 < 0))
        best_v = np.full(len(U), -np.inf)
        best_p = np.zeros_like(U)
        for P, ok in cands:
            v = np.einsum("ij,ij->i", U, P)
            take = ok & (v > best_v)
            best_v = np.where(take, v, best_v)
            best_p = np.where(take[:, None], P, best_p)
        return best_p

    def support_point(self, u):
        return self.support_points(np.asarray(u, float)[None, :])[0]

    def interior_point(self):
        return np.array([0.0, 0.5])

    def outer_radius(self):
        return 1.5

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        t_disk = _ball_exit(X, V, np.zeros(2), 1.0)
        t_disk = np.where(np.isfinite(t_disk), t_disk, 0.0)
        P = X + t_disk[:, None] * V
        crosses = self._curve_gap(P) < 0
        # x2 - |x1|^p is concave along a line: one sign change on [0, t_disk]
        lo = np.zeros(len(X))
        hi = t_disk.copy()
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            ok = self._curve_gap(X + mid[:, None] * V) >= 0
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        return np.where(crosses, lo, t_disk)

    def to_dict(self):
        return {"type": "power_cap", "p": self.p}

    def __repr__(self):
        return f"PowerCap(p={self.p})"


class Polytope(ConvexBody):
    """Convex hull of a finite point set (full-dimensional, n >= 2)."""

    def __init__(self, vertices, p: float = 2.0):
        pts = np.atleast_2d(np.asarray(vertices, float))
        self.dim = pts.shape[1]
        self.norm = NormSpec(p)
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise ValueError("vertices do not span a full-dimensional polytope") from exc
        self.vertices = pts[hull.vertices]
        eq = hull.equations
        self._normals = eq[:, :-1]
        self._offsets = eq[:, -1]
        self._center = self.vertices.mean(axis=0)

    def contains(self, x, tol=1e-9):
        return bool(np.max(self._normals @ np.asarray(x, float) + self._offsets) <= tol)

    def contains_many(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, float))
        return np.max(X @ self._normals.T + self._offsets, axis=1) <= tol

    def support_values(self, U):
        return np.max(np.atleast_2d(U) @ self.vertices.T, axis=1)

    def _tied(self, u, tol=1e-10):
        vals = self.vertices @ np.asarray(u, float)
        top = vals.max()
        return self.vertices[vals >= top - tol * max(1.0, abs(top))]

    def support_point(self, u):
        return lex_smallest(self._tied(u))

    def support_is_unique(self, u, tol=1e-10):
        return len(self._tied(u, tol)) == 1

    def interior_point(self):
        return self._center.copy()

    def outer_radius(self):
        return float(np.max(self.norm.norm(self.vertices - self._center)))

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        num = -(X @ self._normals.T + self._offsets)
        den = V @ self._normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(den > 1e-300, num / den, np.inf)
        return np.maximum(np.min(t, axis=1), 0.0)

    def project(self, x):
        x = np.asarray(x, float)
        if self.contains(x, tol=0.0):
            return x.copy()
        if self.dim != 2:
            return None
        A = self.vertices
        B = np.roll(A, -1, axis=0)
        return _closest_on_segments(x, A, B)

    def to_dict(self):
        return {"type": "polygon", "vertices": self.vertices.tolist()}

    def __repr__(self):
        return f"Polytope({len(self.vertices)} vertices, dim={self.dim})"


Polygon = Polytope


def _closest_on_segments(x, A, B):
    d = B - A
    L2 = np.einsum("ij,ij->i", d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(np.where(L2 > 0, np.einsum("ij,ij->i", x - A, d) / L2, 0.0), 0.0, 1.0)
    P = A + t[:, None] * d
    k = int(np.argmin(np.linalg.norm(P - x, axis=1)))
    return P[k]


class Segment(ConvexBody):
    """Closed segment [a, b]; has empty interior, so ray exits are zero."""

    def __init__(self, a, b, p: float = 2.0):
        self.a = as_vector(a, name="a")
        self.b = as_vector(b, self.a.size, name="b")
        self.dim = self.a.size
        self.norm = NormSpec(p)

    @property
    def vertices(self):
        return np.array([self.a, self.b])

    def _closest(self, X):
        d = self.b - self.a
        L2 = float(d @ d)
        if L2 == 0:
            return np.broadcast_to(self.a, X.shape)
        t = np.clip((X - self.a) @ d / L2, 0.0, 1.0)
        return self.a + t[:, None] * d

    def contains(self, x, tol=1e-9):
        return bool(self.contains_many(np.asarray(x, float)[None, :], tol)[0])

    def contains_many(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, float))
        return self.norm.norm(X - self._closest(X)) <= tol

    def support_values(self, U):
        U = np.atleast_2d(U)
        return np.maximum(U @ self.a, U @ self.b)

    def support_point(self, u):
        u = np.asarray(u, float)
        va, vb = u @ self.a, u @ self.b
        if abs(va - vb) <= 1e-12 * max(1.0, abs(va)):
            return lex_smallest(self.vertices)
        return self.a.copy() if va > vb else self.b.copy()

    def support_is_unique(self, u, tol=1e-10):
        u = np.asarray(u, float)
        if np.allclose(self.a, self.b):
            return True
        va, vb = u @ self.a, u @ self.b
        return abs(va - vb) > tol * max(1.0, abs(va))

    def interior_point(self):
        return 0.5 * (self.a + self.b)

    def outer_radius(self):
        return 0.5 * float(self.norm.norm(self.b - self.a))

    @property
    def inner_radius(self):
        return 0.0

    def ray_exit(self, X, V):
        X, V = _broadcast_rays(X, V)
        return np.zeros(len(X))

    def project(self, x):
        return self._closest(np.asarray(x, float)[None, :])[0].copy()

    def to_dict(self):
        return {"type": "segment", "a": self.a.tolist(), "b": self.b.tolist()}

    def __repr__(self):
        return f"Segment({self.a.tolist()}, {self.b.tolist()})"


class Point(Segment):
    """Singleton {x}."""

    def __init__(self, x, p: float = 2.0):
        super().__init__(x, x, p)

    def to_dict(self):
        return {"type": "point", "x": self.a.tolist()}

    def __repr__(self):
        return f"Point({self.a.tolist()})"


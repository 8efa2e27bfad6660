"""Deterministic direction sampling and local maximization over the sphere."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, stats
from scipy.stats import qmc

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SamplingCfg:
    """Resolution of direction grids used by support-function searches.

    In the plane a uniform angular grid of ``n_planar`` directions is used;
    in higher dimension ``n_spatial`` scrambled-Sobol points pushed onto the
    sphere.  ``refine`` enables local refinement around the best sample.
    """

    n_planar: int = 4096
    n_spatial: int = 2**14
    refine: bool = True
    seed: int = 20240607

    def resolution(self, dim: int) -> float:
        """Typical angular spacing of the grid, in radians."""
        if dim <= 1:
            return 0.0
        if dim == 2:
            return 2.0 * np.pi / self.n_planar
        return float(self.n_spatial ** (-1.0 / (dim - 1)) * 2.0 * np.pi ** 0.5)


DEFAULT_SAMPLING = SamplingCfg()


def circle_directions(n: int, offset: float = 0.0) -> np.ndarray:
    theta = offset + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(theta), np.sin(theta)])


@lru_cache(maxsize=32)
def _sphere_cached(dim: int, n: int, seed: int) -> np.ndarray:
    m = int(np.ceil(np.log2(max(n, 2))))
    pts = qmc.Sobol(d=dim, scramble=True, seed=seed).random_base2(m)[:n]
    g = stats.norm.ppf(np.clip(pts, 1e-12, 1.0 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g.setflags(write=False)
    return g


def sphere_directions(dim: int, n: int, seed: int = DEFAULT_SAMPLING.seed) -> np.ndarray:
    """Euclidean unit vectors covering S^{dim-1} reproducibly."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        return circle_directions(n)
    return np.array(_sphere_cached(dim, n, seed))


def directions(dim: int, cfg: SamplingCfg = DEFAULT_SAMPLING) -> np.ndarray:
    return sphere_directions(dim, cfg.n_planar if dim == 2 else cfg.n_spatial, cfg.seed)


def golden_max(f, a: float, b: float, xtol: float = 1e-12, maxiter: int = 200):
    """Maximize a unimodal scalar function on [a, b]; returns (x, f(x))."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    best = max((fx, x), (fc, c), (fd, d))
    return best[1], best[0]


def maximize_on_sphere(f, dim: int, cfg: SamplingCfg = DEFAULT_SAMPLING, candidates=None):
    """Maximize ``f`` over Euclidean unit vectors.

    ``f`` maps an ``(m, dim)`` array of unit vectors to ``(m,)`` values.
    Returns ``(u, value)``.
    """
    U = directions(dim, cfg) if candidates is None else np.asarray(candidates, float)
    vals = np.asarray(f(U), dtype=float)
    k = int(np.argmax(vals))
    u0, v0 = U[k], float(vals[k])
    if not cfg.refine or dim == 1:
        return u0, v0
    if dim == 2:
        theta0 = float(np.arctan2(u0[1], u0[0]))
        h = 2.0 * np.pi / len(U) if candidates is None else cfg.resolution(2)

        def g(th):
            return float(f(np.array([[np.cos(th), np.sin(th)]]))[0])

        th, val = golden_max(g, theta0 - h, theta0 + h)
        if val > v0:
            return np.array([np.cos(th), np.sin(th)]), val
        return u0, v0
    basis = _tangent_basis(u0)
    step = cfg.resolution(dim)

    def neg(z):
        w = u0 + basis @ z
        w = w / np.linalg.norm(w)
        return -float(f(w[None, :])[0])

    res = optimize.minimize(
        neg,
        np.zeros(dim - 1),
        method="Nelder-Mead",
        options={
            "initial_simplex": np.vstack([np.zeros(dim - 1), step * np.eye(dim - 1)]),
            "xatol": 1e-10,
            "fatol": 1e-14,
            "maxiter": 400 * dim,
        },
    )
    if -res.fun > v0:
        w = u0 + basis @ res.x
        return w / np.linalg.norm(w), float(-res.fun)
    return u0, v0


def _tangent_basis(u):
    """Orthonormal basis (columns) of the orthogonal complement of ``u``."""
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(len(u))]))
    return q[:, 1:]

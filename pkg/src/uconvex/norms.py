"""Ambient norms: finite-dimensional l_p spaces and the max-norm on a product."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _as_float_array(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class NormSpec:
    """The l_p norm on R^n, ``1 <= p <= inf``.

    ``q`` is the dual exponent, ``1/p + 1/q = 1``.  Functionals are
    represented by coordinate vectors in the standard pairing, so the dual
    norm of a functional is its l_q norm.
    """

    p: float = 2.0

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):
            raise ValueError(f"l_p exponent must be >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> float:
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    def norm(self, x):
        return _lp(_as_float_array(x), self.p)

    def dual_norm(self, u):
        return _lp(_as_float_array(u), self.q)

    def normalize(self, x):
        x = _as_float_array(x)
        return x / self.norm(x)[..., None] if x.ndim > 1 else x / self.norm(x)

    def normalize_dual(self, u):
        u = _as_float_array(u)
        return u / self.dual_norm(u)[..., None] if u.ndim > 1 else u / self.dual_norm(u)

    def norming_functional(self, x):
        """Unit functional ``u`` with ``<u, x> = ||x||`` (x nonzero)."""
        return _dual_extremal(_as_float_array(x), self.p)

    def dual_maximizer(self, u):
        """Unit vector ``x`` with ``<u, x> = ||u||_*`` (u nonzero).

        For ``p`` in {1, inf} the maximizer can be non-unique; a canonical
        one is returned (see :func:`dual_maximizer_is_unique`).
        """
        return _dual_extremal(_as_float_array(u), self.q)

    def dual_maximizer_is_unique(self, u, tol=1e-12) -> bool:
        u = _as_float_array(u)
        if 1.0 < self.p < math.inf:
            return True
        a = np.abs(u)
        if math.isinf(self.p):
            return bool(np.all(a > tol * max(a.max(), 1.0)))
        top = a.max()
        return int(np.sum(a >= top - tol * max(top, 1.0))) == 1

    def to_dict(self):
        return {"p": "inf" if math.isinf(self.p) else self.p}


@dataclass(frozen=True)
class ProductNorm:
    """``||(u, v)|| = max(||u||_2, ||v||_2)`` on ``R^{n1} (+) R^{n2}``."""

    n1: int
    n2: int

    is_euclidean = False

    def _split(self, x):
        x = _as_float_array(x)
        return x[..., : self.n1], x[..., self.n1 :]

    def norm(self, x):
        u, v = self._split(x)
        return np.maximum(_lp(u, 2.0), _lp(v, 2.0))

    def dual_norm(self, w):
        u, v = self._split(w)
        return _lp(u, 2.0) + _lp(v, 2.0)

    def normalize(self, x):
        x = _as_float_array(x)
        return x / self.norm(x)[..., None] if x.ndim > 1 else x / self.norm(x)

    def normalize_dual(self, w):
        w = _as_float_array(w)
        return w / self.dual_norm(w)[..., None] if w.ndim > 1 else w / self.dual_norm(w)

    def to_dict(self):
        return {"product_max": [self.n1, self.n2]}


class SubspaceNorm:
    """An ambient norm restricted to ``span(basis)``, in basis coordinates.

    The dual norm of a coordinate functional z is ``max z·c`` over the unit
    ball ``{c : ||basis @ c|| <= 1}``, taken over boundary points along
    ``samples`` directions (exact for k = 1, slightly low otherwise).
    """

    is_euclidean = False

    def __init__(self, ambient, basis, samples: int = 8192):
        from .sampling import sphere_directions

        self.ambient = ambient
        self.basis = _as_float_array(basis)
        k = self.basis.shape[1]
        D = sphere_directions(k, samples if k > 1 else 2)
        self._ball = D / ambient.norm(D @ self.basis.T)[:, None]

    def norm(self, c):
        return self.ambient.norm(_as_float_array(c) @ self.basis.T)

    def dual_norm(self, z):
        return np.max(_as_float_array(z) @ self._ball.T, axis=-1)

    def to_dict(self):
        return {"subspace_of": self.ambient.to_dict(), "basis": self.basis.tolist()}


def _lp(x, p):
    if p == 2.0:
        return np.sqrt(np.sum(x * x, axis=-1))
    a = np.abs(x)
    if math.isinf(p):
        return np.max(a, axis=-1)
    if p == 1.0:
        return np.sum(a, axis=-1)
    # scale first so that large exponents do not overflow
    m = np.max(a, axis=-1)
    safe = np.where(m > 0, m, 1.0)
    r = a / (safe[..., None] if a.ndim > 1 else safe)
    return m * np.sum(r**p, axis=-1) ** (1.0 / p)


def _dual_extremal(x, p):
    """Unit vector in l_q (q dual to p) norming ``x`` in l_p."""
    if x.ndim != 1:
        return np.stack([_dual_extremal(row, p) for row in x])
    a = np.abs(x)
    s = np.sign(x)
    out = np.zeros_like(x)
    if math.isinf(p):
        # norming functional of an l_inf vector: a signed coordinate vector
        k = int(np.argmax(a))
        out[k] = s[k]
        return out
    if p == 1.0:
        return np.where(a > 0, s, 0.0)
    m = a.max()
    if m == 0:
        raise ValueError("zero vector has no norming functional")
    r = a / m
    w = s * r ** (p - 1.0)
    q = p / (p - 1.0)
    return w / _lp(w, q)

"""Selections that split a point of a sum, or of a linear image, into summands."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .bodies import ConvexBody, Product, Scale, Translate, hausdorff_distance
from .bodies.base import as_vector
from .errors import ConfigMissing, InfeasiblePoint, KernelParallel
from .modulus import AnalyticModulus, f_bound
from .projection import (
    AffineSubspace,
    distance_to_body,
    dykstra,
    project_affine,
    project_intersection,
    projector,
)
from .report import _plain
from .sampling import DEFAULT_SAMPLING, SamplingCfg, circle_directions, sphere_directions


class LinearSurjection:
    """A surjective linear map ``L : R^{n1} (+) R^{n2} -> R^m``."""

    def __init__(self, matrix, n1: int):
        self.matrix = np.atleast_2d(np.asarray(matrix, float))
        self.n1 = int(n1)
        self.n_out, n = self.matrix.shape
        self.n2 = n - self.n1
        if self.n2 <= 0 or self.n1 <= 0:
            raise ValueError("split index must leave both factors nonempty")
        if np.linalg.matrix_rank(self.matrix) != self.n_out:
            raise ValueError("map is not surjective")
        self.kernel = AffineSubspace(np.zeros(n), linalg.null_space(self.matrix).T)

    @classmethod
    def difference(cls, n: int) -> "LinearSurjection":
        """``(y1, y2) -> y1 - y2`` on ``R^n (+) R^n``."""
        return cls(np.hstack([np.eye(n), -np.eye(n)]), n)

    def __call__(self, w):
        return self.matrix @ np.asarray(w, float)

    def preimage(self, f) -> AffineSubspace:
        f = as_vector(f, self.n_out, "image point")
        base = np.linalg.lstsq(self.matrix, f, rcond=None)[0]
        return AffineSubspace(base, self.kernel.basis)


@dataclass
class SplitSelection:
    a: np.ndarray
    b: np.ndarray
    certificates: dict = field(default_factory=dict)

    def to_dict(self):
        return _plain({"a": self.a, "b": self.b, "certificates": self.certificates})


def _membership_defect(K: ConvexBody, x) -> float:
    y = K.project(np.asarray(x, float))
    if y is not None:
        return float(np.linalg.norm(x - y))
    return 0.0 if K.contains(x, tol=0.0) else distance_to_body(K, x)


def split_sum(A: ConvexBody, B: ConvexBody, c, tol: float = 1e-10, feas_tol: float = 1e-7,
              reference=None) -> SplitSelection:
    """Split c ∈ A + B as ``a + b`` with a ∈ A, b ∈ B.

    ``a`` is the point of ``(c - B) ∩ A`` nearest to ``reference`` (the
    origin by default), found by Dykstra's algorithm; ``b = c - a``
    exactly.  The continuity bound of :func:`split_sum_bound` needs the
    reference outside A; :func:`reference_point` supplies one.
    Membership defects of both parts are certified.
    """
    c = as_vector(c, A.dim, "point")
    feas = distance_to_body(_sum(A, B), c)
    if feas > feas_tol:
        raise InfeasiblePoint(f"{c} is at distance {feas:.3g} from A + B")
    z = np.zeros(A.dim) if reference is None else as_vector(reference, A.dim, "reference")
    reflected = Translate(Scale(B, -1.0), c)
    res = dykstra(projector(A, tol * 1e-2), projector(reflected, tol * 1e-2), z, tol=tol,
                  max_iters=200_000, stall_window=None)
    a = res.first
    b = c - a
    certs = {
        "defect_a": _membership_defect(A, a),
        "defect_b": _membership_defect(B, b),
        "reconstruction": float(np.linalg.norm(a + b - c)),
        "iterations": res.iterations,
        "converged": res.converged,
        "reference": z,
    }
    return SplitSelection(a, b, certs)


def reference_point(A: ConvexBody) -> np.ndarray:
    """A point outside A, fixed per body, from which nearest points are taken."""
    return A.interior_point() - 2.0 * A.outer_radius() * np.eye(A.dim)[0]


def _sum(A, B):
    from .bodies import MinkowskiSum

    return MinkowskiSum(A, B)


# ---------------------------------------------------------------- Steiner ----

def steiner_point(K: ConvexBody, cfg: SamplingCfg = DEFAULT_SAMPLING) -> np.ndarray:
    """Steiner point by quadrature of ``s(u, K) u`` over the unit sphere.

    The quadrature is calibrated through the second-moment matrix of the
    nodes, which makes it exact for singletons (and hence translations).
    """
    if K.dim == 1:
        U = np.array([[1.0], [-1.0]])
    elif K.dim == 2:
        U = circle_directions(cfg.n_planar)
    else:
        U = sphere_directions(K.dim, cfg.n_spatial, cfg.seed)
    S = K.support_values(U)
    moment = U.T @ U / len(U)
    return np.linalg.solve(moment, U.T @ S / len(U))


def steiner_lipschitz_constant(n: int) -> float:
    """``(2/√π) Γ(n/2 + 1) / Γ((n+1)/2)``."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 / math.sqrt(math.pi) * math.exp(math.lgamma(n / 2 + 1) - math.lgamma((n + 1) / 2))


def triangle_steiner_oracle(vertices) -> np.ndarray:
    """Exterior-angle weighted vertex average of a convex polygon."""
    V = np.asarray(vertices, float)
    n = len(V)
    area2 = np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1])
    if area2 < 0:
        V = V[::-1]
    w = np.empty(n)
    for i in range(n):
        e_in = V[i] - V[i - 1]
        e_out = V[(i + 1) % n] - V[i]
        w[i] = math.atan2(e_in[0] * e_out[1] - e_in[1] * e_out[0], e_in @ e_out)
    return (w / (2.0 * math.pi)) @ V


# ------------------------------------------------------------ parallelism ----

def parallelism_constant(kernel: AffineSubspace, n1: int, starts: int = 16, seed: int = 0) -> float:
    """Largest C with ``min(|u|, |v|) >= C max(|u|, |v|)`` on the kernel.

    Kernel vectors w = (u, v) are parametrized by unit coefficient vectors
    in an orthonormal basis; the ratio is minimized over a direction grid
    and then locally from the best ``starts`` samples.
    """
    W = kernel.basis.T
    k = W.shape[1]
    if k == 0:
        return 1.0
    W1, W2 = W[:n1], W[n1:]

    def ratio(Z):
        Z = np.atleast_2d(Z)
        Z = Z / np.linalg.norm(Z, axis=1, keepdims=True)
        a = np.linalg.norm(Z @ W1.T, axis=1)
        b = np.linalg.norm(Z @ W2.T, axis=1)
        return np.minimum(a, b) / np.maximum(np.maximum(a, b), 1e-300)

    if k == 1:
        return float(ratio(np.ones((1, 1)))[0])
    Z = sphere_directions(k, 4096 if k > 2 else 2048, seed=seed + 1)
    r = ratio(Z)
    best = float(r.min())
    for i in np.argsort(r)[:starts]:
        res = optimize.minimize(lambda z: float(ratio(z)[0]), Z[i], method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
        best = min(best, float(res.fun))
    return max(best, 0.0)


def parallelism_oracle(kernel: AffineSubspace, n1: int) -> float:
    """Same constant from generalized eigenvalues of the two Gram matrices."""
    W = kernel.basis.T
    W1, W2 = W[:n1], W[n1:]
    G1, G2 = W1.T @ W1, W2.T @ W2
    vals = []
    for P, Q in ((G1, G2), (G2, G1)):
        try:
            lam = linalg.eigh(P, Q, eigvals_only=True)
            vals.append(math.sqrt(max(lam.min(), 0.0)))
        except linalg.LinAlgError:
            vals.append(0.0)
    return min(1.0, *vals)


def split_kernel(F1, F2, L: LinearSurjection, f, t, tol: float = 1e-10) -> SplitSelection:
    """Split the selection f(t) ∈ L(F1(t), F2(t)) into f1(t) ∈ F1(t), f2(t) ∈ F2(t).

    The least-norm point w(t) of ``L⁻¹(f(t))`` fixes the affine fibre
    ``w(t) + ker L``; the answer is the least-norm point of the product
    body on that fibre (Euclidean norm on the product).
    """
    C = parallelism_constant(L.kernel, L.n1)
    if not C > 1e-12:
        raise KernelParallel("ker L contains vectors with a vanishing component")
    A1, A2 = F1(t), F2(t)
    target = np.asarray(f(t), float)
    fibre = L.preimage(target)
    w = project_affine(fibre, np.zeros(L.n1 + L.n2)).point
    P = Product(A1, A2)
    res = project_intersection(P, AffineSubspace(w, L.kernel.basis), np.zeros(L.n1 + L.n2), tol=tol)
    y = res.point
    f1, f2 = y[: L.n1], y[L.n1 :]
    certs = {
        "reconstruction": float(np.linalg.norm(L(y) - target)),
        "defect_1": _membership_defect(A1, f1),
        "defect_2": _membership_defect(A2, f2),
        "parallelism": C,
        "fibre_point": w,
        "iterations": res.iterations,
        "converged": res.converged,
        "norm_equivalence": [1.0, math.sqrt(2.0)],
    }
    return SplitSelection(f1, f2, certs)


# ------------------------------------------------------- continuity bounds ----

def ball_family_modulus(r: float, R: float, ambient: AnalyticModulus | None = None) -> AnalyticModulus:
    """Common modulus ``R δ_E(ε/R)`` of the balls ``B_t(0)``, t ∈ [r, R], on (0, 2r]."""
    ambient = ambient or AnalyticModulus.euclid_ball(1.0)
    base = AnalyticModulus.strongly_convex_lower(R, ambient, domain_max=2.0 * r)
    return base.with_params(r0=r, M=2.0 * R)


def split_sum_bound(A: ConvexBody, B: ConvexBody, modulus_A, delta0=None, M=None, z=None):
    """Modulus of continuity of ``c -> a(c)`` for :func:`split_sum`.

    Returns ``g`` with ``|a(c1) - a(c2)| <= g(|c1 - c2|)``, namely
    ``4x + 2 f(x) + f_E(2x + f(x))`` where f is built from the modulus of
    A and f_E from the balls about the reference point that meet A.
    """
    z = np.zeros(A.dim) if z is None else np.asarray(z, float)
    Az = Translate(A, -z)
    r = distance_to_body(Az, np.zeros(A.dim))
    if not r > 0:
        raise ConfigMissing("the reference point must lie outside A")
    R = float(np.max(Az.support_values(sphere_directions(A.dim, 4096))))
    mE = ball_family_modulus(r, R)

    def g(x):
        fx = f_bound(modulus_A, x, delta0, M)
        return 4.0 * x + 2.0 * fx + f_bound(mE, 2.0 * x + fx)

    return g


def steiner_split_bound(modulus_A, n: int, delta0=None, M=None):
    """``L_n (2x + f(x))`` for Steiner-point splitting."""
    Ln = steiner_lipschitz_constant(n)
    return lambda x: Ln * (2.0 * x + f_bound(modulus_A, x, delta0, M))


def kernel_bound(modulus, C: float, delta0=None, M=None):
    """``ω + f(ω)/C`` for the fibre intersections of a kernel split."""
    return lambda w: w + f_bound(modulus, w, delta0, M) / C


def hausdorff_product(A, B, n1):
    """Hausdorff distance in the max-norm of ``R^{n1} (+) R^{n2}``."""
    from .norms import ProductNorm

    return hausdorff_distance(A, B, norm=ProductNorm(n1, A.dim - n1))

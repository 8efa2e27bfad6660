import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uconvex.bodies import Ellipsoid, MinkowskiSum, PBall, Point, Polygon, Translate, hausdorff_distance
from uconvex.errors import InfeasiblePoint, KernelParallel
from uconvex.experiments import constant_family, translating_family
from uconvex.modulus import AnalyticModulus
from uconvex.projection import AffineSubspace, project_body
from uconvex.splitting import (
    LinearSurjection,
    kernel_bound,
    parallelism_constant,
    parallelism_oracle,
    reference_point,
    split_kernel,
    split_sum,
    split_sum_bound,
    steiner_lipschitz_constant,
    steiner_point,
    steiner_split_bound,
    triangle_steiner_oracle,
)

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


# ------------------------------------------------------------ split_sum ----

def test_split_tangent_balls():
    ball = PBall([0, 0], 1.0)
    sel = split_sum(ball, ball, [2, 0])
    assert sel.a == pytest.approx([1, 0], abs=1e-6) and sel.b == pytest.approx([1, 0], abs=1e-6)


def test_split_of_origin():
    sel = split_sum(PBall([0, 0], 1.0), PBall([0, 0], 1.0), [0, 0])
    assert np.allclose(sel.a, 0) and np.allclose(sel.b, 0)


def test_split_against_grid_oracle():
    # a(c) is the point of (c - B) ∩ A nearest the origin
    A, B = PBall([3, 0], 1.0), Polygon(SQUARE)
    c = np.array([3.5, 0.5])
    sel = split_sum(A, B, c)
    g = np.arange(1.5, 4.0005, 1e-3)
    X = np.stack(np.meshgrid(g, np.arange(-1.0, 1.0005, 1e-3)), -1).reshape(-1, 2)
    X = X[A.contains_many(X, 0.0) & B.contains_many(c - X, 0.0)]
    a = X[np.argmin(np.linalg.norm(X, axis=1))]
    assert sel.a == pytest.approx(a, abs=2e-3)
    assert sel.certificates["defect_a"] <= 1e-6 and sel.certificates["defect_b"] <= 1e-6


def test_split_rejects_infeasible_point():
    with pytest.raises(InfeasiblePoint):
        split_sum(PBall([0, 0], 1.0), Polygon(SQUARE), [5, 5])


@settings(max_examples=15)
@given(st.floats(0, 1), st.floats(0, 2 * math.pi), st.floats(0, 1), st.floats(0, 1))
def test_split_reconstruction_and_membership(r, ang, sx, sy):
    A, B = PBall([3, 0], 1.0), Polygon(SQUARE)
    c = np.array([3 + math.sqrt(r) * math.cos(ang), math.sqrt(r) * math.sin(ang)]) + [sx, sy]
    sel = split_sum(A, B, c)
    assert np.linalg.norm(sel.a + sel.b - c) <= 1e-9
    assert sel.certificates["defect_a"] <= 1e-6 and sel.certificates["defect_b"] <= 1e-6


def test_split_continuity_bound(rng):
    A, B = PBall([3, 0], 1.0), Polygon(SQUARE)
    g = split_sum_bound(A, B, AnalyticModulus.euclid_ball(1.0), delta0=1.0, M=2.0)
    base = np.array([3.5, 0.5])
    for d in rng.normal(scale=0.05, size=(15, 2)):
        s1, s2 = split_sum(A, B, base), split_sum(A, B, base + d)
        assert np.linalg.norm(s1.a - s2.a) <= g(np.linalg.norm(d)) + 1e-8


def test_reference_point_lies_outside():
    A = PBall([0, 0], 1.0)
    assert not A.contains(reference_point(A))


# -------------------------------------------------------------- Steiner ----

def test_steiner_calibration_cases():
    assert steiner_point(Point([0.3, -0.7])) == pytest.approx([0.3, -0.7], abs=1e-12)
    assert steiner_point(PBall([1.0, 2.0], 0.5)) == pytest.approx([1.0, 2.0], abs=1e-9)


def test_steiner_triangle_matches_exterior_angle_formula():
    tri = [[0, 0], [1, 0], [0, 1]]
    assert triangle_steiner_oracle(tri) == pytest.approx([0.375, 0.375], abs=1e-12)
    assert steiner_point(Polygon(tri)) == pytest.approx([0.375, 0.375], abs=1e-3)


def test_steiner_is_additive(rng):
    K1, K2 = Polygon(rng.normal(size=(5, 2))), Ellipsoid.ellipse([1, 0], [1, 0.3], 0.4)
    total = steiner_point(MinkowskiSum(K1, K2))
    assert np.linalg.norm(total - steiner_point(K1) - steiner_point(K2)) <= 1e-6


def test_steiner_lipschitz_constants():
    assert steiner_lipschitz_constant(1) == pytest.approx(1.0)
    assert steiner_lipschitz_constant(2) == pytest.approx(4 / math.pi)
    assert steiner_lipschitz_constant(3) == pytest.approx(1.5)
    vals = [steiner_lipschitz_constant(n) for n in range(1, 11)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        steiner_lipschitz_constant(0)


def test_steiner_lipschitz_on_polygons(rng):
    for _ in range(20):
        K1, K2 = Polygon(rng.normal(size=(6, 2))), Polygon(rng.normal(size=(6, 2)))
        lhs = np.linalg.norm(steiner_point(K1) - steiner_point(K2))
        assert lhs <= 4 / math.pi * hausdorff_distance(K1, K2) + 5e-3


def test_steiner_split_bound_uses_lipschitz_constant():
    g = steiner_split_bound(AnalyticModulus.euclid_ball(1.0), 2, delta0=1.0, M=2.0)
    assert g(0.0) == 0.0
    assert g(0.1) > 4 / math.pi * 0.2


# ---------------------------------------------------------- parallelism ----

def test_parallelism_examples():
    diag = LinearSurjection.difference(2).kernel
    assert parallelism_constant(diag, 2) == pytest.approx(1.0, abs=1e-9)
    flat = AffineSubspace(np.zeros(4), [[1, 0, 0, 0], [0, 1, 0, 0]])
    assert parallelism_constant(flat, 2) == pytest.approx(0.0, abs=1e-9)
    double = AffineSubspace(np.zeros(2), [[1, 2]])
    assert parallelism_constant(double, 1) == pytest.approx(0.5, abs=1e-9)


@given(st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_parallelism_matches_eigenvalue_oracle(xs):
    M = np.reshape(xs, (2, 4))
    if np.linalg.matrix_rank(M, tol=1e-3) < 2:
        return
    K = AffineSubspace(np.zeros(4), M)
    assert parallelism_constant(K, 2) == pytest.approx(parallelism_oracle(K, 2), abs=1e-6)


def test_linear_surjection_validation():
    L = LinearSurjection([[1.0, 2.0, -1.0]], 1)
    assert np.allclose(L.matrix @ L.kernel.basis.T, 0, atol=1e-10)
    with pytest.raises(ValueError):
        LinearSurjection([[1, 0], [2, 0]], 1)
    with pytest.raises(ValueError):
        LinearSurjection([[1, 0]], 2)


# ---------------------------------------------------------- split_kernel ----

def test_split_kernel_nearest_point_configuration():
    A = Ellipsoid.ellipse([2.0, 1.0], [1.0, 0.5], 0.3)
    radius = float(np.linalg.norm(project_body(A, np.zeros(2)).point))
    F1 = constant_family(A)
    F2 = constant_family(PBall([0, 0], radius))
    sel = split_kernel(F1, F2, LinearSurjection.difference(2), lambda t: np.zeros(2), 0.0, tol=1e-12)
    p = project_body(A, np.zeros(2)).point
    assert sel.a == pytest.approx(p, abs=1e-6) and sel.b == pytest.approx(p, abs=1e-6)


def test_split_kernel_unit_balls_at_zero():
    F = constant_family(PBall([0, 0], 1.0))
    sel = split_kernel(F, F, LinearSurjection.difference(2), lambda t: np.zeros(2), 0.5)
    assert np.allclose(sel.a, 0, atol=1e-9) and np.allclose(sel.b, 0, atol=1e-9)


def test_split_kernel_translated_balls_against_grid():
    # f1 - f2 = f with f1 in B1((t,0)), f2 in B1((-t,0)); least-norm (f1, f2) on a 2D fibre
    F1 = translating_family(PBall([0, 0], 1.0), [1.0, 0.0])
    F2 = translating_family(PBall([0, 0], 1.0), [-1.0, 0.0])
    f = np.array([1.2, 0.3])
    t = 0.4
    sel = split_kernel(F1, F2, LinearSurjection.difference(2), lambda _t: f, t)
    assert np.linalg.norm(sel.a - sel.b - f) <= 1e-9
    g = np.arange(-0.6, 1.4005, 1e-3)
    X = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    ok = F1(t).contains_many(X, 0.0) & F2(t).contains_many(X - f, 0.0)
    X = X[ok]
    best = X[np.argmin(np.sum(X**2, axis=1) + np.sum((X - f) ** 2, axis=1))]
    assert sel.a == pytest.approx(best, abs=3e-3)


def test_split_kernel_rejects_parallel_kernel():
    F = constant_family(PBall([0, 0], 1.0))
    L = LinearSurjection([[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]], 2)
    with pytest.raises(KernelParallel):
        split_kernel(F, F, L, lambda t: np.zeros(2), 0.0)


def test_kernel_bound_formula():
    m = AnalyticModulus.power(2.0)
    g = kernel_bound(m, 0.5, delta0=0.25, M=2.0)
    assert g(0.1) == pytest.approx(0.1 + 2 * math.sqrt(0.2))


def test_translate_preserves_split_structure():
    A, B = Translate(PBall([0, 0], 1.0), [3, 0]), Polygon(SQUARE)
    sel = split_sum(A, B, [3.2, 0.9])
    assert np.linalg.norm(sel.a + sel.b - [3.2, 0.9]) <= 1e-9

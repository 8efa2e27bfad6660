import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uconvex.bodies import Ellipsoid, PBall, Point, Polygon, PowerCap, Product, Translate
from uconvex.errors import (
    DegenerateFaceWarning,
    EmptyIntersectionSuspected,
    GaugeUnbounded,
    NonEuclideanNorm,
    OriginNotInterior,
)
from uconvex.projection import (
    AffineSubspace,
    a_relative_projection,
    distance_to_body,
    dykstra,
    gauge_distance,
    project_affine,
    project_body,
    project_intersection,
)

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


def brute_nearest(body, x, lo, hi, step):
    g = np.arange(lo, hi + step / 2, step)
    X = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    X = X[body.contains_many(X, tol=0.0)]
    return X[np.argmin(np.linalg.norm(X - x, axis=1))]


# ---------------------------------------------------------------- affine ----

def test_project_affine_examples():
    line = AffineSubspace([0, 1], [[1, 0]])
    r = project_affine(line, [0, 0])
    assert r.point == pytest.approx([0, 1]) and r.distance == pytest.approx(1.0)
    assert project_affine(line, [3, 1]).distance == 0.0
    diag = AffineSubspace([0, 0], [[1, 1]])
    r = project_affine(diag, [1, 0])
    assert r.point == pytest.approx([0.5, 0.5]) and r.distance == pytest.approx(math.sqrt(0.5))


@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_affine_residual_is_orthogonal(xs):
    S = AffineSubspace.from_equations([[1.0, 2.0, -1.0, 0.5]], [0.7])
    x = np.array(xs)
    y = project_affine(S, x).point
    assert np.abs(S.basis @ (x - y)).max() <= 1e-9 * (1 + np.abs(x).max())
    assert np.allclose(S.basis @ S.basis.T, np.eye(S.dim), atol=1e-12)


def test_affine_rejects_non_euclidean():
    from uconvex.norms import NormSpec

    with pytest.raises(NonEuclideanNorm):
        project_affine(AffineSubspace([0, 0], [[1, 0]], norm=NormSpec(4.0)), [1, 1])
    with pytest.raises(NonEuclideanNorm):
        project_body(PBall([0, 0], 1.0, p=4.0), [2, 2])


# ------------------------------------------------------------------ body ----

def test_project_body_examples():
    assert project_body(PBall([2, 0], 1.0), [0, 0]).point == pytest.approx([1, 0])
    assert project_body(PBall([2, 0], 1.0), [2.5, 0.1]).distance == 0.0
    r = project_body(Polygon(SQUARE), [2, 0.5], closed_form=False, tol=1e-12)
    assert r.converged and r.point == pytest.approx([1, 0.5], abs=1e-6)


def test_frank_wolfe_matches_closed_form_ellipse(rng):
    E = Ellipsoid.ellipse([0.5, -0.2], [1.0, 0.3], 0.7)
    for x in rng.normal(scale=3.0, size=(10, 2)):
        exact = project_body(E, x).point
        fw = project_body(E, x, closed_form=False, tol=1e-14).point
        assert fw == pytest.approx(exact, abs=2e-6)


def test_closed_form_ellipse_against_boundary_scan():
    E = Ellipsoid.ellipse([0.5, -0.2], [1.0, 0.3], 0.7)
    th = np.linspace(0, 2 * np.pi, 200_000, endpoint=False)
    c, s = math.cos(0.7), math.sin(0.7)
    local = np.column_stack([np.cos(th), 0.3 * np.sin(th)])
    P = np.array([0.5, -0.2]) + local @ np.array([[c, s], [-s, c]])
    x = np.array([2.0, 1.0])
    y = P[np.argmin(np.linalg.norm(P - x, axis=1))]
    assert project_body(E, x).point == pytest.approx(y, abs=1e-4)


def test_power_cap_projection_against_grid():
    x = np.array([0.9, -0.4])
    got = project_body(PowerCap(2.0), x, tol=1e-14).point
    assert got == pytest.approx(brute_nearest(PowerCap(2.0), x, -1.0, 1.0, 1e-3), abs=2e-3)


@given(st.lists(st.floats(-4, 4), min_size=4, max_size=4))
def test_projection_idempotent_and_nonexpansive(xs):
    A = Polygon([[0, 0], [2, 0.5], [1, 2], [-0.5, 1]])
    x, y = np.array(xs[:2]), np.array(xs[2:])
    px = project_body(A, x, tol=1e-12).point
    py = project_body(A, y, tol=1e-12).point
    assert project_body(A, px, tol=1e-12).distance <= 1e-6
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 2e-6


def test_distance_to_body_from_support_data():
    assert distance_to_body(PBall([0, 0], 1.0), [3, 4]) == pytest.approx(4.0, abs=1e-9)
    assert distance_to_body(Polygon(SQUARE), [0.5, 0.5]) == 0.0


# ---------------------------------------------------------- intersection ----

def test_project_intersection_examples():
    ball = PBall([0, 0], 1.0)
    r = project_intersection(ball, AffineSubspace([0, 0], [[1, 0]]), [2, 0])
    assert r.point == pytest.approx([1, 0], abs=1e-8)
    r = project_intersection(ball, AffineSubspace([0, 1], [[1, 0]]), [0, 0], tol=1e-12, max_iters=200_000)
    assert r.point == pytest.approx([0, 1], abs=2e-3)


def test_project_intersection_product_diagonal_against_grid():
    # (B1((0.5,0)) x B1((-0.5,0))) on the diagonal {(y, y)} is y in the lens B1((0.5,0)) ∩ B1((-0.5,0))
    P = Product(PBall([0.5, 0], 1.0), PBall([-0.5, 0], 1.0))
    S = AffineSubspace(np.zeros(4), [[1, 0, 1, 0], [0, 1, 0, 1]])
    target = np.array([0.3, 1.2, 0.3, 1.2])
    r = project_intersection(P, S, target)
    lens = [PBall([0.5, 0], 1.0), PBall([-0.5, 0], 1.0)]
    g = np.arange(-1.0, 1.0005, 1e-3)
    X = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    X = X[lens[0].contains_many(X, 0.0) & lens[1].contains_many(X, 0.0)]
    y = X[np.argmin(np.linalg.norm(X - target[:2], axis=1))]
    assert r.point == pytest.approx(np.concatenate([y, y]), abs=5e-3)


def test_dykstra_detects_disjoint_sets():
    A, B = PBall([0, 0], 1.0), PBall([3, 0], 1.0)
    with pytest.raises(EmptyIntersectionSuspected):
        dykstra(A.project, B.project, np.zeros(2))


# ----------------------------------------------------------------- gauge ----

def test_gauge_distance_examples():
    ball = PBall([0, 0], 1.0)
    assert gauge_distance(ball, Point([0, 0]), [0.5, 0]) == pytest.approx(0.5, abs=1e-8)
    assert gauge_distance(ball, ball, [0.2, 0.1]) == 0.0
    assert gauge_distance(ball, ball, [1.5, 0]) == pytest.approx(0.5, abs=1e-8)


@given(st.floats(0.1, 4.0))
def test_gauge_distance_is_positively_homogeneous(lam):
    ball = PBall([0, 0], 1.0)
    c = np.array([0.3, -0.4])
    assert gauge_distance(ball, Point([0, 0]), lam * c) == pytest.approx(lam * 0.5, abs=1e-7)


def test_gauge_errors():
    with pytest.raises(OriginNotInterior):
        gauge_distance(PBall([2, 0], 1.0), Point([0, 0]), [1, 0])
    with pytest.raises(GaugeUnbounded):
        gauge_distance(PBall([0, 0], 1.0), Point([0, 0]), [10, 0], t_max=2.0)


# -------------------------------------------------------- A-relative ----

def test_relative_projection_tangent_balls():
    ball = PBall([0, 0], 1.0)
    r = a_relative_projection(ball, ball, [1.5, 0])
    assert r.rho == pytest.approx(0.5, abs=1e-8)
    assert r.b == pytest.approx([1, 0], abs=1e-6) and r.a == pytest.approx([0.5, 0], abs=1e-6)


def test_relative_projection_trivial_cases():
    ball = PBall([0, 0], 1.0)
    r = a_relative_projection(ball, Point([0, 0]), [0.3, 0.4])
    assert r.b == pytest.approx([0, 0], abs=1e-6) and r.a == pytest.approx([0.3, 0.4], abs=1e-6)
    r = a_relative_projection(ball, ball, [0.3, 0.4])
    assert r.rho == 0.0 and np.array_equal(r.b, [0.3, 0.4])


@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_relative_projection_decomposes_exactly(x, y):
    A, B = Ellipsoid.ellipse([0, 0], [1.0, 0.5]), Translate(PBall([0, 0], 0.5), [0.5, 0.2])
    c = np.array([x, y])
    r = a_relative_projection(A, B, c)
    assert np.linalg.norm(r.a + r.b - c) <= 1e-12
    if r.rho > 0:
        assert float(A.gauge(np.atleast_2d(r.a / r.rho))[0]) <= 1 + 1e-6


def test_relative_projection_flags_flat_faces():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = a_relative_projection(Polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]]), Point([0, 0]), [2.0, 0.0])
    assert not r.unique
    assert any(issubclass(w.category, DegenerateFaceWarning) for w in caught)

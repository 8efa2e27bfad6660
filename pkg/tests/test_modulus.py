import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uconvex.bodies import BallIntersection, PBall, Polygon, PowerCap
from uconvex.errors import ConfigMissing, OutOfRange, OutsidePoint
from uconvex.modulus import (
    AnalyticModulus,
    ModulusTable,
    day_nordlander_rhs,
    depth,
    estimate_modulus,
    f_bound,
    integral_diagnostic,
    inverse_modulus,
    phi,
    strongly_convex_lower,
    verify_diameter_bound,
    verify_monotonicity,
    verify_quadratic_cap,
    verify_scaling,
    verify_strongly_convex,
    verify_supporting_continuity,
)

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


def ball_delta(r, e):
    return r - math.sqrt(r * r - e * e / 4)


# ---------------------------------------------------------------- depth ----

def test_depth_closed_forms():
    ball = PBall([0, 0], 1.0)
    assert depth(ball, [0, 0]) == pytest.approx(1.0, abs=1e-9)
    assert depth(ball, [0.5, 0]) == pytest.approx(0.5, abs=1e-9)


def test_depth_near_parabola_vertex():
    # distance from (0, t) to x2 = x1^2 is t itself for t <= 1/2
    assert depth(PowerCap(2.0), [0, 0.0025]) == pytest.approx(0.0025, rel=1e-4)


def test_depth_rejects_outside_point():
    with pytest.raises(OutsidePoint):
        depth(PBall([0, 0], 1.0), [2, 0])


# ------------------------------------------------------------ estimation ----

def test_ball_estimate_matches_closed_form():
    r = 1.0
    eps = np.linspace(0.1 * r, 1.8 * r, 12)
    table = estimate_modulus(PBall([0, 0], r), eps)
    exact = np.array([ball_delta(r, e) for e in eps])
    assert np.all(np.abs(table.delta - exact) <= np.maximum(2e-3, 0.01 * exact))


def test_diameter_one_ball_anchor():
    table = estimate_modulus(PBall([0, 0], 0.5), [0.6])
    assert table(0.6) == pytest.approx(0.1, abs=2e-3)


@pytest.mark.parametrize("p", [3.0, 4.0])
def test_power_cap_estimate_matches_vertex_modulus(p):
    eps = np.linspace(0.05, 0.3, 6)
    table = estimate_modulus(PowerCap(p), eps)
    exact = (eps / 2) ** p
    assert np.all(np.abs(table.delta - exact) <= np.maximum(1e-3, 0.05 * exact))


def test_power_cap_2_is_limited_by_the_corners():
    # the parabola is flattest at the corners, where curvature is 2 / (1 + 4 x^2)^(3/2), x^2 = (sqrt5 - 1)/2;
    # small chords there have depth about kappa eps^2 / 8, far below (eps/2)^2
    x2 = (math.sqrt(5) - 1) / 2
    kappa = 2.0 / (1.0 + 4.0 * x2) ** 1.5
    table = estimate_modulus(PowerCap(2.0), [0.05])
    assert table(0.05) < 0.5 * 0.05**2 / 4
    assert table(0.05) == pytest.approx(kappa * 0.05**2 / 8, rel=0.1)


def test_square_modulus_vanishes_below_side():
    table = estimate_modulus(Polygon(SQUARE), [0.2, 0.5, 0.9])
    assert np.all(table.delta <= 1e-12)


def test_unrealizable_chords_flagged_when_not_strict():
    table = estimate_modulus(PBall([0, 0], 1.0), [0.5, 2.5], strict=False)
    assert table.meta["unrealizable"] == [2.5]
    assert math.isnan(table.raw[1])


def test_estimate_rejects_non_positive_eps():
    with pytest.raises(OutOfRange):
        estimate_modulus(PBall([0, 0], 1.0), [0.0, 0.5])


def test_table_round_trips_through_json(tmp_path):
    table = estimate_modulus(PBall([0, 0], 1.0), [0.5, 1.0, 1.5])
    path = tmp_path / "t.json"
    table.to_json(path)
    again = ModulusTable.from_json(path)
    assert np.array_equal(again.eps, table.eps) and np.array_equal(again.delta, table.delta)
    assert table.to_csv().splitlines()[0] == "eps,delta"


def test_table_interpolation_conventions():
    t = ModulusTable(np.array([0.5, 1.0]), np.array([0.1, 0.3]))
    assert t(0.25) == 0.0
    assert t(0.75) == pytest.approx(0.2)
    assert t(5.0) == pytest.approx(0.3)


@given(st.lists(st.floats(0, 1), min_size=3, max_size=12))
def test_table_inverse_is_right_continuous_sup(vals):
    eps = np.linspace(0.1, 1.0, len(vals))
    t = ModulusTable(eps, np.maximum.accumulate(np.asarray(vals)))
    fine = np.linspace(0.0, 1.0, 20001)
    for y in np.linspace(0, t.sup, 7)[1:-1]:
        if y == 0:  # the inverse is pinned to 0 there by convention
            continue
        brute = fine[t(fine) <= y + 1e-15].max()
        assert t.inverse(y) == pytest.approx(brute, abs=1e-4)


# ---------------------------------------------------------- analytic ----

def test_analytic_moduli():
    assert AnalyticModulus.euclid_ball(1.0)(1.0) == pytest.approx(1 - math.sqrt(3) / 2)
    assert AnalyticModulus.power(2.0)(0.2) == pytest.approx(0.01)
    assert strongly_convex_lower(1.0, AnalyticModulus.euclid_ball(1.0), 1.0) == pytest.approx(0.13397, abs=1e-5)
    assert strongly_convex_lower(2.0, AnalyticModulus.euclid_ball(1.0), 2.0) == pytest.approx(0.26795, abs=1e-5)
    assert strongly_convex_lower(1.0, AnalyticModulus.euclid_ball(1.0), 0.0) == 0.0


def test_inverse_modulus():
    m = AnalyticModulus.power(2.0)
    assert inverse_modulus(m, 0.01) == pytest.approx(0.2, abs=1e-9)
    assert inverse_modulus(m, 0.0) == 0.0
    with pytest.raises(OutOfRange):
        inverse_modulus(AnalyticModulus.euclid_ball(1.0), 5.0)


@given(st.floats(0.01, 1.99))
def test_inverse_undoes_strictly_increasing_moduli(e):
    for m in (AnalyticModulus.euclid_ball(1.0), AnalyticModulus.power(3.0, domain_max=2.0)):
        assert inverse_modulus(m, m(e)) == pytest.approx(e, abs=1e-6)


def test_phi():
    assert phi(AnalyticModulus.euclid_ball(1.0), 1.0) == pytest.approx(4 * (1 - math.sqrt(3) / 2))
    assert phi(AnalyticModulus.power(2.0), 0.2) == pytest.approx(0.2)
    assert phi(AnalyticModulus.euclid_ball(1.0), 1e-8) < 1e-7


def test_f_bound_branches():
    m = AnalyticModulus.power(2.0)
    assert f_bound(m, 0.1, delta0=0.25, M=2.0) == pytest.approx(math.sqrt(0.2), abs=1e-9)
    assert f_bound(m, 0.5, delta0=0.25, M=2.0) == pytest.approx(2.0)
    assert f_bound(m, 0.0, delta0=0.25, M=2.0) == 0.0
    with pytest.raises(ConfigMissing):
        f_bound(m, 0.1)


def test_f_bound_is_right_continuous_at_breakpoint():
    m = AnalyticModulus.power(2.0)
    at = f_bound(m, 0.5, delta0=0.25, M=2.0)
    assert f_bound(m, 0.5 + 1e-12, delta0=0.25, M=2.0) == pytest.approx(at, abs=1e-9)


@given(st.floats(0, 3), st.floats(0, 3))
def test_f_bound_is_monotone(x, y):
    m = AnalyticModulus.euclid_ball(1.0)
    lo, hi = sorted((x, y))
    assert f_bound(m, lo, delta0=1.0, M=2.0) <= f_bound(m, hi, delta0=1.0, M=2.0) + 1e-12


# --------------------------------------------------------- verifiers ----

def test_scaling_closed_form_margin():
    m = AnalyticModulus.euclid_ball(1.0)
    assert m(0.5) == pytest.approx(1 - math.sqrt(1 - 1 / 16))
    assert m(0.5) <= 0.5 * m(1.0)
    assert verify_scaling(m).worst_margin >= -1e-6


@pytest.mark.parametrize("m", [AnalyticModulus.euclid_ball(1.0), AnalyticModulus.power(2.0),
                               AnalyticModulus.power(4.0)])
def test_analytic_moduli_pass_scaling_and_monotonicity(m):
    assert verify_scaling(m).passed
    assert verify_monotonicity(m).passed


def test_square_table_scaling_and_non_strict_monotonicity():
    zeros = ModulusTable(np.linspace(0.1, 0.9, 5), np.zeros(5))
    assert verify_scaling(zeros).passed
    rep = verify_monotonicity(zeros)
    assert rep.passed
    assert any("non-strict" in n for n in rep.notes)


def test_diameter_bound_values():
    rep = verify_diameter_bound(PBall([0, 0], 1.0), AnalyticModulus.euclid_ball(1.0), eps=[1.0])
    (rec,) = rep.records
    assert rec["N"] == 8 and rec["bound"] == pytest.approx(8.0)
    skipped = verify_diameter_bound(Polygon(SQUARE), ModulusTable(np.array([0.5]), np.array([0.0])))
    assert skipped.parameters["skipped"] == 1


def test_quadratic_cap_values():
    rep = verify_quadratic_cap(PBall([0, 0], 1.0), AnalyticModulus.euclid_ball(1.0), eps=[1.0])
    assert rep.records[0]["cap"] == pytest.approx(1.0)
    assert rep.passed


def test_quadratic_cap_catches_an_inflated_table():
    fake = ModulusTable(np.array([0.5, 1.0]), np.array([0.5, 2.0]))
    assert not verify_quadratic_cap(PBall([0, 0], 1.0), fake).passed


def test_day_nordlander_rhs_matches_ball():
    e = np.linspace(0.1, 0.9, 9)
    lhs = [ball_delta(0.5, x) for x in e]
    assert np.allclose(day_nordlander_rhs(e), lhs, atol=1e-15)


def test_supporting_continuity_on_ball():
    m = AnalyticModulus.euclid_ball(1.0)
    # orthogonal functionals: |x1 - x2| = sqrt2, phi(sqrt2) = 4(1 - sqrt(1/2)) / sqrt2
    assert phi(m, math.sqrt(2)) == pytest.approx(0.82843, abs=1e-5)
    rep = verify_supporting_continuity(PBall([0, 0], 1.0), m, trials=200)
    assert rep.passed and rep.worst_margin >= -1e-3


def test_strongly_convex_lower_bound_dominated_by_estimate():
    body = BallIntersection(1.0, [[0, 0], [0.5, 0], [0.2, 0.4]])
    table = estimate_modulus(body, np.linspace(0.05, 0.5, 6))
    assert verify_strongly_convex(body, table).passed


def test_integral_diagnostic_has_no_verdict():
    rep = integral_diagnostic(AnalyticModulus.euclid_ball(1.0))
    assert rep.status == "diagnostic"

import math

import numpy as np
import pytest

from uconvex.bodies import PBall, PowerCap, Segment, hausdorff_distance
from uconvex.errors import BodyLoadError, DimensionMismatch, EmptyIntersection, HypothesisViolated
from uconvex.experiments import (
    SetValuedFamily,
    audit_modulus,
    audit_omega,
    constant_family,
    default_manifests,
    designed_projection_families,
    example_31_sharpness,
    example_32_stability,
    family_from_dict,
    fit_holder,
    horizontal_line_family,
    intersection_family,
    modulus_from_dict,
    pushed_vertex_family,
    remark_33_projection_holder,
    run_manifest,
    translating_family,
    verify_lemma_32,
    verify_theorem_31,
)
from uconvex.modulus import AnalyticModulus
from uconvex.projection import AffineSubspace, project_body
from uconvex.splitting import LinearSurjection

UNIT = PBall([0.0, 0.0], 1.0)


def ball_family(v, t=(0.0, 0.3), declare=True):
    m = AnalyticModulus.euclid_ball(1.0, r0=1.0, delta0=1.0, M=2.0) if declare else None
    return translating_family(UNIT, v, t, modulus=m)


# ----------------------------------------------------------- families ----

def test_family_omega_conventions():
    assert translating_family(UNIT, [3.0, 4.0]).omega_at(0.1) == pytest.approx(0.5)
    assert constant_family(UNIT).omega_at(1.0) == 0.0
    custom = SetValuedFamily(lambda t: UNIT, omega=lambda r: math.sqrt(r))
    assert custom.omega_at(0.25) == pytest.approx(0.5)
    with pytest.raises(HypothesisViolated):
        SetValuedFamily(lambda t: UNIT).omega_at(0.1)


def test_sample_pairs_are_seeded():
    F = constant_family(UNIT, (0.2, 0.4))
    a, b = F.sample_pairs(10, 3), F.sample_pairs(10, 3)
    assert np.array_equal(a, b) and a.min() >= 0.2 and a.max() <= 0.4


def test_intersection_family_examples():
    H = intersection_family(constant_family(UNIT), constant_family(UNIT))
    assert hausdorff_distance(H(0.5), UNIT) <= 1e-12
    cap = intersection_family(constant_family(PowerCap(2.0)), horizontal_line_family(1.5))
    seg = cap(0.04)
    assert isinstance(seg, Segment)
    assert sorted([seg.a[0], seg.b[0]]) == pytest.approx([-0.2, 0.2], abs=1e-9)
    assert seg.a[1] == pytest.approx(0.04)
    apart = intersection_family(translating_family(UNIT, [5.0, 0.0]), constant_family(UNIT))
    with pytest.raises(EmptyIntersection):
        apart(1.0)


def test_pushed_vertex_family_geometry():
    F = pushed_vertex_family()
    t = 1e-3
    p = project_body(F(t), np.zeros(2), tol=1e-14).point
    assert p == pytest.approx([math.sqrt(t / 2), t - 1], abs=1e-6)
    assert hausdorff_distance(F(0.0), F(t)) <= t + 1e-12


def test_family_from_dict_round_trip():
    spec = {"type": "translating", "body": UNIT.to_dict(), "velocity": [1, 0], "t": [0, 0.5],
            "omega": 1.0, "modulus": {"kind": "euclid_ball", "r": 1.0}}
    F = family_from_dict(spec)
    assert F.t_max == 0.5 and F.modulus(1.0) == pytest.approx(1 - math.sqrt(3) / 2)
    with pytest.raises(BodyLoadError):
        family_from_dict({"type": "spiral"})


def test_modulus_from_dict_fills_r0_and_m():
    m = modulus_from_dict({"kind": "power", "p": 2}, PowerCap(2.0))
    assert m.M == pytest.approx(2 * math.sqrt((math.sqrt(5) - 1) / 2), abs=1e-6)
    assert m.r0 > 0


# -------------------------------------------------------------- audits ----

def test_omega_audit_catches_understated_speed():
    F = translating_family(UNIT, [1.0, 0.0])
    F.omega = 0.5
    assert not audit_omega(F, F.sample_pairs(5, 0)).passed


def test_modulus_audit_rejects_overstated_modulus():
    F = constant_family(PowerCap(2.0), modulus=AnalyticModulus.power(2.0, r0=0.05, M=1.6))
    rep = audit_modulus(F)
    assert not rep.passed


def test_audit_failure_makes_run_inconclusive():
    F1 = constant_family(PowerCap(2.0), (0.01, 0.25), modulus=AnalyticModulus.power(2.0, r0=0.05, M=1.6))
    rep = verify_theorem_31(F1, horizontal_line_family(1.5, (0.01, 0.25)), pairs=5)
    assert rep.status == "inconclusive"
    with pytest.raises(HypothesisViolated):
        verify_theorem_31(F1, horizontal_line_family(1.5, (0.01, 0.25)), pairs=5, strict_audit=True)


# ------------------------------------------------------ continuity bounds ----

def test_intersection_bound_constant_families():
    F = constant_family(UNIT, modulus=AnalyticModulus.euclid_ball(1.0, r0=1.0, delta0=1.0, M=2.0))
    rep = verify_theorem_31(F, constant_family(UNIT), pairs=5)
    assert rep.passed
    assert all(r["lhs"] == 0.0 and r["rhs"] == 0.0 for r in rep.records)


def test_intersection_bound_translating_balls_checks_both_roles():
    rep = verify_theorem_31(ball_family([1.0, 0.0]), ball_family([-1.0, 0.0]), pairs=10)
    assert rep.passed and rep.parameters["roles"] == "both"
    assert all(r["rhs"] <= min(r["rhs_f1"], r["rhs_f2"]) for r in rep.records)


def test_sharpness_lower_bound_values():
    h = hausdorff_distance(Segment([-0.1, 0.01], [0.1, 0.01]), Segment([-math.sqrt(0.02), 0.02],
                                                                      [math.sqrt(0.02), 0.02]))
    assert h >= (math.sqrt(2) - 1) * 0.1
    rep = example_31_sharpness(2.0)
    assert rep.passed
    assert 0.45 <= rep.parameters["fitted_exponent"] <= 0.55
    first = rep.records[0]
    assert first["bound"] == pytest.approx((math.sqrt(2) - 1) * 1e-2)


def test_sharpness_p4_exponent():
    rep = example_31_sharpness(4.0)
    assert 0.20 <= rep.parameters["fitted_exponent"] <= 0.30


def test_sharpness_argument_checks():
    with pytest.raises(ValueError):
        example_31_sharpness(1.5)
    with pytest.raises(ValueError):
        example_31_sharpness(2.0, scales=5)


def test_minimization_stability_closed_forms():
    shifted = PBall([0.0, 0.1], 1.0)
    rep = example_32_stability([3.0, 0.0], [(UNIT, UNIT), (UNIT, shifted)])
    same, moved = rep.records
    assert same["lhs"] == 0.0 and same["rhs"] == 0.0
    u2 = np.array([0.0, 0.1]) + np.array([3.0, -0.1]) / math.hypot(3.0, 0.1)
    assert moved["lhs"] == pytest.approx(np.linalg.norm(u2 - [1.0, 0.0]), abs=1e-8)
    assert moved["h"] == pytest.approx(0.1, abs=1e-12)
    assert rep.passed


def test_subspace_bound_diagonal_and_double_kernels():
    F1, F2 = ball_family([1.0, 0.0]), ball_family([1.0, 0.0])
    diag = LinearSurjection.difference(2).kernel
    rep = verify_lemma_32(F1, F2, diag, pairs=4)
    assert rep.passed and rep.parameters["C"] == pytest.approx(1.0)
    double = AffineSubspace(np.zeros(4), [[1, 0, 2, 0], [0, 1, 0, 2]])
    rep = verify_lemma_32(F1, F2, double, pairs=4)
    assert rep.parameters["C"] == pytest.approx(0.5, abs=1e-9)
    assert rep.passed


def test_subspace_bound_constant_families():
    F = constant_family(UNIT, modulus=AnalyticModulus.euclid_ball(1.0, r0=1.0, delta0=1.0, M=2.0))
    rep = verify_lemma_32(F, F, LinearSurjection.difference(2).kernel, pairs=3)
    assert rep.passed and all(r["lhs"] == 0.0 for r in rep.records)


def test_subspace_bound_parallel_kernel_is_inconclusive():
    flat = AffineSubspace(np.zeros(4), [[1, 0, 0, 0], [0, 1, 0, 0]])
    rep = verify_lemma_32(ball_family([1.0, 0.0]), ball_family([1.0, 0.0]), flat, pairs=3)
    assert rep.status == "inconclusive"


# ----------------------------------------------------------- Hölder fit ----

def test_fit_holder_recovers_synthetic_exponent():
    h = np.geomspace(1e-4, 1e-1, 10)
    alpha, K, used = fit_holder(h, 3.0 * h**0.5)
    assert alpha == pytest.approx(0.5) and K == pytest.approx(3.0) and used == 10
    alpha, _, used = fit_holder(h, 3.0 * h**0.5, floor=0.1)
    assert used < 10


@pytest.mark.parametrize("name", list(designed_projection_families()))
def test_projection_holder_families(name):
    fam = designed_projection_families()[name]
    rep = remark_33_projection_holder(fam, min_exponent=0.9 if name == "translating_balls" else 0.45)
    assert rep.passed, rep.parameters["fitted_exponent"]


def test_pushed_vertex_is_in_the_square_root_regime():
    rep = remark_33_projection_holder(designed_projection_families()["pushed_vertex"])
    assert rep.parameters["fitted_exponent"] == pytest.approx(0.5, abs=0.05)


# ------------------------------------------------------------ manifests ----

def test_manifest_errors():
    with pytest.raises(BodyLoadError):
        run_manifest({"pairs": 3})
    with pytest.raises(BodyLoadError):
        run_manifest({"experiment": "thm99"})
    with pytest.raises(BodyLoadError):
        run_manifest({"experiment": "thm31"})
    with pytest.raises(DimensionMismatch):
        run_manifest({"experiment": "split-sum", "A": UNIT.to_dict(),
                      "B": PBall([0, 0, 0], 1.0).to_dict()})


def test_manifest_embeds_itself_and_timing():
    doc = {"experiment": "steiner", "pairs": 5, "seed": 1}
    rep = run_manifest(doc)
    assert rep.parameters["manifest"] == doc
    assert "runtime_s" in rep.metadata
    assert "metadata" not in rep.to_dict(comparison=True)


def test_default_manifests_cover_every_experiment():
    kinds = {m["experiment"] for m in default_manifests()}
    assert kinds == {"thm31", "ex31", "ex32", "lem32", "rem33", "split-sum", "split-kernel", "steiner"}

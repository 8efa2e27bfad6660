"""End-to-end checks of the continuity estimates for set-valued families.

Every verifier first audits the hypotheses it relies on (declared moduli of
continuity and convexity against measured ones, nonparallel kernels) and
only then scores the inequality.  A failed audit yields an
``"inconclusive"`` report.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bodies import (
    ConvexBody,
    Ellipsoid,
    LinearImage,
    PBall,
    Polygon,
    PowerCap,
    Product,
    Segment,
    Slice,
    Translate,
    body_from_dict,
    diameter,
    hausdorff_distance,
    intersect,
    load_body,
)
from .errors import BodyLoadError, DimensionMismatch, HypothesisViolated, KernelParallel
from .modulus import AnalyticModulus, ModulusCfg, estimate_modulus, f_bound
from .norms import ProductNorm
from .projection import AffineSubspace, project_body
from .report import Report, combine
from .sampling import DEFAULT_SAMPLING, SamplingCfg
from .splitting import (
    LinearSurjection,
    parallelism_constant,
    split_kernel,
    split_sum,
    split_sum_bound,
    steiner_lipschitz_constant,
    steiner_point,
    triangle_steiner_oracle,
)

AUDIT_MODULUS = ModulusCfg(n_boundary=512)


# ---------------------------------------------------------------- families ----

@dataclass
class SetValuedFamily:
    """``t -> F(t)`` on ``[t_min, t_max]`` with its declared regularity.

    ``omega`` is the declared modulus of continuity in the Hausdorff metric
    (a number K stands for ``ω(ρ) = K ρ``); ``modulus`` the declared common
    modulus of convexity of the images, carrying r0, Δ0 and M.
    """

    generator: Callable[[float], ConvexBody]
    t_min: float = 0.0
    t_max: float = 1.0
    omega: float | Callable | None = None
    modulus: AnalyticModulus | None = None
    name: str = "family"
    spec: dict = field(default_factory=dict)

    def __call__(self, t) -> ConvexBody:
        return self.generator(float(t))

    def omega_at(self, rho: float) -> float:
        if self.omega is None:
            raise HypothesisViolated(f"{self.name} declares no modulus of continuity")
        if callable(self.omega):
            return float(self.omega(rho))
        return float(self.omega) * float(rho)

    def sample_pairs(self, n: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.uniform(self.t_min, self.t_max, size=(n, 2))

    def to_dict(self):
        d = dict(self.spec) if self.spec else {"type": "custom", "name": self.name}
        d.setdefault("t", [self.t_min, self.t_max])
        if self.modulus is not None:
            d["declared_modulus"] = self.modulus.to_dict()
        return d


def constant_family(body: ConvexBody, t_range=(0.0, 1.0), modulus=None, name=None) -> SetValuedFamily:
    return SetValuedFamily(lambda t: body, *t_range, omega=0.0, modulus=modulus,
                           name=name or f"constant[{body!r}]",
                           spec={"type": "constant", "body": body.to_dict()})


def translating_family(body: ConvexBody, velocity, t_range=(0.0, 1.0), modulus=None,
                       name=None) -> SetValuedFamily:
    v = np.asarray(velocity, float)
    if v.size != body.dim:
        raise DimensionMismatch("velocity and body dimensions differ")
    return SetValuedFamily(lambda t: Translate(body, t * v), *t_range, omega=float(np.linalg.norm(v)),
                           modulus=modulus, name=name or f"translating[{body!r}]",
                           spec={"type": "translating", "body": body.to_dict(), "velocity": v.tolist()})


def horizontal_line_family(half_width: float = 1.5, t_range=(0.0, 1.0)) -> SetValuedFamily:
    """The lines ``{x2 = t}``, cut to ``|x1| <= half_width``."""
    w = float(half_width)
    return SetValuedFamily(lambda t: Segment([-w, t], [w, t]), *t_range, omega=1.0,
                           name="horizontal_line",
                           spec={"type": "horizontal_line", "half_width": w})


def rotating_ellipse_family(center, semi_axes, rate: float = 1.0, angle0: float = 0.0,
                            t_range=(0.0, 0.2)) -> SetValuedFamily:
    a = float(max(semi_axes))
    return SetValuedFamily(lambda t: Ellipsoid.ellipse(center, semi_axes, angle0 + rate * t), *t_range,
                           omega=a * abs(rate), name="rotating_ellipse",
                           spec={"type": "rotating_ellipse", "center": list(map(float, center)),
                                 "semi_axes": list(map(float, semi_axes)), "rate": rate,
                                 "angle0": angle0})


def pushed_vertex_family(t_range=(0.0, 1e-2)) -> SetValuedFamily:
    """Segment ``[(0,-1), (1,-1)]`` with an extra vertex ``(sqrt(t/2), t - 1)``.

    The new vertex is within t of the segment yet becomes the point nearest
    to the origin, so the nearest point moves by about sqrt(t/2).
    """

    def gen(t):
        if t <= 0:
            return Segment([0.0, -1.0], [1.0, -1.0])
        return Polygon([[0.0, -1.0], [1.0, -1.0], [math.sqrt(t / 2.0), t - 1.0]])

    return SetValuedFamily(gen, *t_range, omega=1.0, name="pushed_vertex", spec={"type": "pushed_vertex"})


def intersection_family(F1: SetValuedFamily, F2: SetValuedFamily) -> SetValuedFamily:
    """``t -> F1(t) ∩ F2(t)``; a segment factor is clipped exactly."""
    t_min, t_max = max(F1.t_min, F2.t_min), min(F1.t_max, F2.t_max)
    if t_min > t_max:
        raise ValueError("families have disjoint parameter ranges")
    return SetValuedFamily(lambda t: intersect(F1(t), F2(t)), t_min, t_max,
                           name=f"{F1.name} ∩ {F2.name}",
                           spec={"type": "intersection", "parts": [F1.to_dict(), F2.to_dict()]})


def _body(spec, p=2.0):
    if isinstance(spec, dict) and "body" in spec and "type" not in spec:
        return load_body(spec)
    return body_from_dict(spec, p)


def modulus_from_dict(spec: dict | None, body: ConvexBody | None = None, cfg: ModulusCfg = AUDIT_MODULUS):
    """Declared modulus from a manifest entry; missing r0 and M are measured on ``body``."""
    if spec is None:
        return None
    kind = spec.get("kind")
    extra = {}
    r0 = spec.get("r0")
    if r0 is None and body is not None:
        r0 = float(body.inner_radius)
    M = spec.get("M")
    if M is None and body is not None:
        M = diameter(body)
    if kind == "euclid_ball":
        m = AnalyticModulus.euclid_ball(float(spec["r"]))
    elif kind == "power":
        m = AnalyticModulus.power(float(spec["p"]))
    elif kind == "strongly_convex_lower":
        m = AnalyticModulus.strongly_convex_lower(float(spec["R"]))
    elif kind == "estimate":
        if body is None:
            raise BodyLoadError("an estimated modulus needs a body")
        top = min(2.0 * r0, 0.98 * diameter(body))
        grid = np.linspace(top / 24, top, 24)
        m = AnalyticModulus.from_table(estimate_modulus(body, grid, cfg))
    else:
        raise BodyLoadError(f"unknown modulus kind {kind!r}")
    extra["r0"] = r0
    extra["M"] = M
    if "delta0" in spec:
        extra["delta0"] = float(spec["delta0"])
    return m.with_params(**extra)


def family_from_dict(spec: dict) -> SetValuedFamily:
    try:
        kind = spec["type"]
        t_range = tuple(map(float, spec.get("t", (0.0, 1.0))))
        if kind == "constant":
            body = _body(spec["body"])
            fam = constant_family(body, t_range)
        elif kind == "translating":
            body = _body(spec["body"])
            fam = translating_family(body, spec["velocity"], t_range)
        elif kind == "horizontal_line":
            fam = horizontal_line_family(spec.get("half_width", 1.5), t_range)
        elif kind == "rotating_ellipse":
            fam = rotating_ellipse_family(spec["center"], spec["semi_axes"], spec.get("rate", 1.0),
                                          spec.get("angle0", 0.0), t_range)
        elif kind == "pushed_vertex":
            fam = pushed_vertex_family(t_range)
        else:
            raise BodyLoadError(f"unknown family type {kind!r}")
    except (KeyError, TypeError) as exc:
        raise BodyLoadError(f"bad family description: {exc}") from exc
    if "omega" in spec:
        fam.omega = float(spec["omega"])
    if "modulus" in spec:
        fam.modulus = modulus_from_dict(spec["modulus"], fam(fam.t_min))
    fam.spec = dict(spec)
    return fam


# ------------------------------------------------------------------ audits ----

def _pmap(fn, items, threads: int = 1):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _hausdorff_tol(A, B, cfg: SamplingCfg, norm=None) -> float:
    res = hausdorff_distance(A, B, cfg, norm=norm, full_output=True)
    if res.method == "exact":
        return res.distance, 1e-9
    # the support gap is Lipschitz in u with constant at most R_A + R_B
    slack = 0.5 * (A.outer_radius() + B.outer_radius()) * res.resolution
    return res.distance, slack + 1e-8


def audit_omega(F: SetValuedFamily, pairs, cfg: SamplingCfg = DEFAULT_SAMPLING, norm=None,
                threads: int = 1) -> Report:
    """Measured ``h(F(t1), F(t2))`` against the declared ``ω(|t1 - t2|)``."""
    rep = Report(f"audit_omega[{F.name}]")

    def one(pair):
        t1, t2 = pair
        h, tol = _hausdorff_tol(F(t1), F(t2), cfg, norm)
        return t1, t2, h, tol

    for t1, t2, h, tol in _pmap(one, pairs, threads):
        w = F.omega_at(abs(t1 - t2))
        rep.tolerance = max(rep.tolerance, tol)
        rep.add(w - h, t1=t1, t2=t2, measured=h, declared=w)
    return rep.finalize()


def audit_modulus(F: SetValuedFamily, m: AnalyticModulus | None = None, ts=None, n_eps: int = 6,
                  rel: float = 0.02, cfg: ModulusCfg = AUDIT_MODULUS) -> Report:
    """Declared image modulus, r0 and M against measurements at sample parameters.

    The declared δ must not exceed the estimate by more than ``rel``
    (relative); every sampled image must hold a ball of radius r0 and have
    diameter at most M.
    """
    m = F.modulus if m is None else m
    rep = Report(f"audit_modulus[{F.name}]", tolerance=1e-9)
    if m is None:
        rep.notes.append("no declared modulus")
        return rep.finalize(audit_ok=False)
    ts = [F.t_min, F.t_max] if ts is None else ts
    if F.omega == 0.0:
        ts = ts[:1]
    for t in ts:
        body = F(t)
        d = diameter(body)
        r = float(body.inner_radius)
        rep.add(r - m.r0, t=t, check="r0", measured=r, declared=m.r0)
        rep.add(m.M - d, t=t, check="M", measured=d, declared=m.M)
        top = min(2.0 * m.r0, m.domain_max, 0.98 * d)
        eps = np.linspace(top / n_eps, top, n_eps)
        est = estimate_modulus(body, eps, cfg, strict=False)
        for e, de in zip(eps, est.delta):
            declared = float(m(e))
            rep.add(de * (1.0 + rel) - declared, t=t, check="delta", eps=e, measured=de, declared=declared)
    return rep.finalize()


def _audited(rep: Report, audits, strict: bool):
    ok = all(a.passed for a in audits)
    rep.parameters["audits"] = [a.to_dict(comparison=True) for a in audits]
    if not ok:
        bad = [a.name for a in audits if not a.passed]
        rep.notes.append("hypothesis audit failed: " + ", ".join(bad))
        if strict:
            raise HypothesisViolated(rep.notes[-1])
    return ok


# --------------------------------------------------------- intersections ----

def verify_theorem_31(
    F1: SetValuedFamily,
    F2: SetValuedFamily,
    pairs: int = 50,
    seed: int = 7,
    cfg: SamplingCfg = DEFAULT_SAMPLING,
    threads: int = 1,
    strict_audit: bool = False,
) -> Report:
    """``h(H(t1), H(t2)) <= ω1 + 2 ω2 + f(ω1 + ω2)`` for ``H = F1 ∩ F2``.

    f is built from the declared modulus of F1.  When F2 also declares one,
    the bound with the roles exchanged is evaluated too and the smaller
    right-hand side is scored.
    """
    started = time.perf_counter()
    H = intersection_family(F1, F2)
    T = F1.sample_pairs(pairs, seed)
    T = np.clip(T, H.t_min, H.t_max)
    rep = Report("thm31", {"family1": F1.to_dict(), "family2": F2.to_dict(), "pairs": pairs, "seed": seed})
    audits = [audit_omega(F1, T, cfg, threads=threads), audit_omega(F2, T, cfg, threads=threads),
              audit_modulus(F1)]
    if F2.modulus is not None:
        audits.append(audit_modulus(F2))
    ok = _audited(rep, audits, strict_audit)

    def one(pair):
        t1, t2 = pair
        return _hausdorff_tol(H(t1), H(t2), cfg)

    measured = _pmap(one, T, threads)
    swapped = F2.modulus is not None and audits[-1].passed
    for (t1, t2), (lhs, tol) in zip(T, measured):
        rho = abs(t1 - t2)
        w1, w2 = F1.omega_at(rho), F2.omega_at(rho)
        rhs1 = w1 + 2.0 * w2 + f_bound(F1.modulus, w1 + w2)
        rhs2 = w2 + 2.0 * w1 + f_bound(F2.modulus, w1 + w2) if swapped else math.inf
        rhs = min(rhs1, rhs2)
        rep.tolerance = max(rep.tolerance, tol)
        rep.add(rhs - lhs, t1=t1, t2=t2, lhs=lhs, rhs=rhs, rhs_f1=rhs1, rhs_f2=rhs2, omega1=w1, omega2=w2)
    rep.parameters["roles"] = "both" if swapped else "F1"
    rep.metadata["runtime_s"] = time.perf_counter() - started
    return rep.finalize(ok)


def example_31_sharpness(p: float = 2.0, t_min: float = 1e-4, t_max: float = 1e-2, scales: int = 10,
                         half_width: float = 1.5, exponent_slack: float = 0.05) -> Report:
    """Lower bound ``h(H(t), H(2t)) >= (2^{1/p} - 1) t^{1/p}`` and the fitted exponent.

    H(t) is the power cap cut by the line ``x2 = t``; the log-log slope of
    ``h`` against ``t`` must lie within ``exponent_slack`` of 1/p.
    """
    if p < 2:
        raise ValueError("exponent must be at least 2")
    if scales < 8:
        raise ValueError("at least 8 scales are needed for the fit")
    started = time.perf_counter()
    H = intersection_family(constant_family(PowerCap(p)), horizontal_line_family(half_width))
    t = np.geomspace(t_min, t_max, scales)
    rep = Report("ex31", {"p": p, "t_min": t_min, "t_max": t_max, "scales": scales}, tolerance=1e-6)
    hs = []
    for t1 in t:
        h = hausdorff_distance(H(t1), H(2.0 * t1))
        bound = (2.0 ** (1.0 / p) - 1.0) * t1 ** (1.0 / p)
        hs.append(h)
        rep.add(h - bound, t1=t1, t2=2.0 * t1, h=h, bound=bound)
    slope, intercept = np.polyfit(np.log(t), np.log(hs), 1)
    rep.parameters.update(fitted_exponent=float(slope), fitted_constant=float(np.exp(intercept)),
                          expected_exponent=1.0 / p)
    fit_margin = exponent_slack - abs(slope - 1.0 / p)
    rep.add(fit_margin, check="exponent", fitted=float(slope), expected=1.0 / p)
    rep.metadata["runtime_s"] = time.perf_counter() - started
    return rep.finalize()


def _ball_level_modulus(r: float) -> AnalyticModulus:
    return AnalyticModulus.euclid_ball(r, r0=r, delta0=r, M=2.0 * r)


def example_32_stability(x0, body_pairs, cfg: SamplingCfg = DEFAULT_SAMPLING, tol: float = 1e-12) -> Report:
    """``|u1 - u2| <= 2h + f(h)`` for the minimizers of ``|x - x0|²`` over A1 and A2.

    The level set through the worse minimizer is a ball of radius
    ``r = |u2 - x0|``; f uses its modulus with Δ0 = r and M = 2r.
    """
    x0 = np.asarray(x0, float)
    rep = Report("ex32", {"x0": x0, "pairs": len(body_pairs)})
    for k, (A1, A2) in enumerate(body_pairs):
        u1 = project_body(A1, x0, tol=tol).point
        u2 = project_body(A2, x0, tol=tol).point
        if np.linalg.norm(u1 - x0) > np.linalg.norm(u2 - x0):
            u1, u2 = u2, u1
        r = float(np.linalg.norm(u2 - x0))
        h, htol = _hausdorff_tol(A1, A2, cfg)
        lhs = float(np.linalg.norm(u1 - u2))
        if r == 0.0:
            rhs = 2.0 * h
        else:
            rhs = 2.0 * h + f_bound(_ball_level_modulus(r), h)
        rep.tolerance = max(rep.tolerance, 2.0 * htol + 1e-6)
        rep.add(rhs - lhs, index=k, h=h, lhs=lhs, rhs=rhs, level_radius=r)
    return rep.finalize()


def _kernel_section(F1: SetValuedFamily, F2: SetValuedFamily, kernel: AffineSubspace):
    basis = kernel.basis.T

    def gen(t):
        P = Product(F1(t), F2(t))
        return LinearImage.from_slice(Slice(P, np.zeros(P.dim), basis))

    return gen


def verify_lemma_32(
    F1: SetValuedFamily,
    F2: SetValuedFamily,
    kernel: AffineSubspace,
    modulus: AnalyticModulus | None = None,
    pairs: int = 50,
    seed: int = 7,
    cfg: SamplingCfg = DEFAULT_SAMPLING,
    threads: int = 1,
    strict_audit: bool = False,
) -> Report:
    """``h(H(t1), H(t2)) <= ω + f(ω)/C`` for ``H(t) = (F1(t) × F2(t)) ∩ ker``.

    Distances use the max-norm of the product; ω is the larger of the two
    declared moduli of continuity and f comes from the common image
    modulus (F1's declared one by default).
    """
    started = time.perf_counter()
    n1 = F1(F1.t_min).dim
    n2 = F2(F2.t_min).dim
    norm = ProductNorm(n1, n2)
    modulus = modulus or F1.modulus
    rep = Report("lem32", {"family1": F1.to_dict(), "family2": F2.to_dict(),
                           "kernel": kernel.basis, "pairs": pairs, "seed": seed})
    C = parallelism_constant(kernel, n1)
    rep.parameters["C"] = C
    if not C > 1e-12:
        rep.notes.append("kernel is parallel to a factor (C = 0)")
        if strict_audit:
            raise KernelParallel(rep.notes[-1])
        return rep.finalize(audit_ok=False)
    if modulus is not None and modulus.M is not None:
        M = max(modulus.M, max(diameter(F1(t)) for t in (F1.t_min, F1.t_max)),
                max(diameter(F2(t)) for t in (F2.t_min, F2.t_max)))
        modulus = modulus.with_params(M=M)
    T = F1.sample_pairs(pairs, seed)
    audits = [audit_omega(F1, T, cfg, threads=threads), audit_omega(F2, T, cfg, threads=threads),
              audit_modulus(F1, modulus), audit_modulus(F2, modulus)]
    ok = _audited(rep, audits, strict_audit)
    H = _kernel_section(F1, F2, kernel)

    def one(pair):
        t1, t2 = pair
        return _hausdorff_tol(H(t1), H(t2), cfg, norm)

    for (t1, t2), (lhs, tol) in zip(T, _pmap(one, T, threads)):
        rho = abs(t1 - t2)
        w = max(F1.omega_at(rho), F2.omega_at(rho))
        rhs = w + f_bound(modulus, w) / C
        rep.tolerance = max(rep.tolerance, tol)
        rep.add(rhs - lhs, t1=t1, t2=t2, lhs=lhs, rhs=rhs, omega=w)
    rep.metadata["runtime_s"] = time.perf_counter() - started
    return rep.finalize(ok)


# -------------------------------------------------------- projection Hölder ----

def _nearest_to_origin(A: ConvexBody, tol: float) -> np.ndarray:
    return project_body(A, np.zeros(A.dim), tol=tol).point


def fit_holder(h, inc, floor: float = 0.0):
    """Least-squares fit of ``inc ≈ K h^α`` on log scales; drops increments below floor."""
    h, inc = np.asarray(h, float), np.asarray(inc, float)
    keep = (inc > floor) & (h > 0)
    if keep.sum() < 2:
        return math.nan, math.nan, int(keep.sum())
    alpha, logk = np.polyfit(np.log(h[keep]), np.log(inc[keep]), 1)
    return float(alpha), float(np.exp(logk)), int(keep.sum())


def remark_33_projection_holder(
    family: SetValuedFamily,
    s_ref: float | None = None,
    scales: int = 10,
    min_exponent: float = 0.45,
    solver_tol: float = 1e-14,
    cfg: SamplingCfg = DEFAULT_SAMPLING,
) -> Report:
    """Fit α in ``|p(A_s) - p(A_ref)| ≈ K h(A_s, A_ref)^α`` for the nearest point p of 0.

    Offsets from the reference parameter form a geometric grid of
    ``scales`` values spanning three decades; increments below 10× the
    solver accuracy are discarded.  Passes when at least 8 scales survive and α >= min_exponent.
    """
    s_ref = family.t_min if s_ref is None else float(s_ref)
    span = family.t_max - s_ref
    offsets = np.geomspace(span * 1e-3, span, scales)
    A0 = family(s_ref)
    p0 = _nearest_to_origin(A0, solver_tol)
    rep = Report("rem33", {"family": family.to_dict(), "s_ref": s_ref, "scales": scales,
                           "min_exponent": min_exponent})
    hs, incs = [], []
    for d in offsets:
        A = family(s_ref + d)
        h = hausdorff_distance(A0, A, cfg)
        inc = float(np.linalg.norm(_nearest_to_origin(A, solver_tol) - p0))
        hs.append(h)
        incs.append(inc)
        rep.add(s=s_ref + d, h=h, increment=inc)
    floor = 10.0 * math.sqrt(solver_tol)
    alpha, K, used = fit_holder(hs, incs, floor)
    rep.parameters.update(fitted_exponent=alpha, fitted_constant=K, scales_used=used)
    margin = alpha - min_exponent if used >= 8 else -math.inf
    if used < 8:
        rep.notes.append(f"only {used} increments above the noise floor")
    rep.add(margin, check="exponent", fitted=alpha)
    return rep.finalize()


def designed_projection_families() -> dict:
    """The families on which the nearest-point map is probed."""
    return {
        "translating_balls": translating_family(PBall([2.0, 0.0], 1.0), [1.0, 0.0], (0.0, 0.2),
                                                name="translating_balls"),
        "rotating_ellipse": rotating_ellipse_family([0.0, 1.5], [1.0, 0.01], 1.0, 0.0, (0.0, 0.2)),
        "power_cap_vertex": translating_family(Translate(PowerCap(2.0), [0.0, 0.1]), [0.0, 1.0], (0.0, 0.2),
                                               name="power_cap_vertex"),
        "pushed_vertex": pushed_vertex_family((0.0, 1e-2)),
    }


# ---------------------------------------------------------------- splitting ----

def _feasible_points(A, B, n, seed):
    """Points ``a + b`` from random support points and interior mixtures."""
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n, A.dim))
    V = rng.standard_normal((n, A.dim))
    lam = rng.uniform(0.0, 1.0, (n, 1))
    mu = rng.uniform(0.0, 1.0, (n, 1))
    a = A.interior_point() + lam * (A.support_points(U) - A.interior_point())
    b = B.interior_point() + mu * (B.support_points(V) - B.interior_point())
    return a + b


def split_sum_experiment(A, B, samples=1000, seed=42, modulus=None, pairs=100, tol=1e-10) -> Report:
    """Certificates of :func:`~uconvex.splitting.split_sum` on random feasible points.

    With a declared modulus of A, the continuity bound is also checked on
    nearby pairs of points (the proof's reference point must lie outside A).
    """
    rep = Report("split-sum", {"A": A.to_dict(), "B": B.to_dict(), "samples": samples, "seed": seed},
                 tolerance=0.0)
    C = _feasible_points(A, B, samples, seed)
    worst = {"reconstruction": 0.0, "defect_a": 0.0, "defect_b": 0.0}
    for c in C:
        cert = split_sum(A, B, c, tol=tol).certificates
        for k in worst:
            worst[k] = max(worst[k], cert[k])
    rep.add(1e-9 - worst["reconstruction"], check="reconstruction", worst=worst["reconstruction"])
    rep.add(1e-6 - max(worst["defect_a"], worst["defect_b"]), check="membership",
            worst=max(worst["defect_a"], worst["defect_b"]))
    if modulus is not None:
        g = split_sum_bound(A, B, modulus)
        rng = np.random.default_rng(seed + 1)
        for c1 in C[:pairs]:
            c2 = _feasible_points(A, B, 1, int(rng.integers(2**31)))[0]
            c2 = c1 + rng.uniform(0.0, 0.2) * (c2 - c1)
            a1 = split_sum(A, B, c1, tol=tol).a
            a2 = split_sum(A, B, c2, tol=tol).a
            x = float(np.linalg.norm(c1 - c2))
            lhs = float(np.linalg.norm(a1 - a2))
            rep.add(g(x) - lhs + 1e-8, check="continuity", x=x, lhs=lhs, rhs=g(x))
    return rep.finalize()


def split_kernel_nearest_point(A: ConvexBody, tol: float = 1e-12) -> Report:
    """Kernel split of ``0 = y1 - y2`` with ``y1 ∈ A`` and ``y2`` in the ball of radius dist(0, A).

    The only solution is ``y1 = y2 = p(A)``, compared with a direct projection.
    """
    p = project_body(A, np.zeros(A.dim), tol=tol).point
    rho = float(np.linalg.norm(p))
    L = LinearSurjection.difference(A.dim)
    rep = Report("split-kernel", {"A": A.to_dict(), "configuration": "nearest_point"}, tolerance=0.0)
    sel = split_kernel(lambda t: A, lambda t: PBall(np.zeros(A.dim), rho), L, lambda t: np.zeros(A.dim), 0.0)
    e1 = float(np.linalg.norm(sel.a - p))
    e2 = float(np.linalg.norm(sel.b - p))
    rep.add(1e-6 - e1, check="f1", error=e1)
    rep.add(1e-6 - e2, check="f2", error=e2)
    rep.add(1e-9 - sel.certificates["reconstruction"], check="reconstruction",
            error=sel.certificates["reconstruction"])
    rep.parameters["certificates"] = sel.certificates
    return rep.finalize()


def _random_polygon(rng, n_max=8):
    k = int(rng.integers(3, n_max + 1))
    ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, k))
    r = rng.uniform(0.5, 1.5, k)
    return Polygon(rng.uniform(-1.0, 1.0, 2) + np.column_stack([r * np.cos(ang), r * np.sin(ang)]))


def steiner_experiment(pairs: int = 100, seed: int = 42, cfg: SamplingCfg = DEFAULT_SAMPLING) -> Report:
    """Triangle value, Minkowski additivity and the Lipschitz bound of the Steiner point."""
    from .bodies import MinkowskiSum

    rep = Report("steiner", {"pairs": pairs, "seed": seed}, tolerance=0.0)
    tri = Polygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    s = steiner_point(tri, cfg)
    oracle = triangle_steiner_oracle(tri.vertices)
    err = float(np.linalg.norm(s - oracle))
    rep.add(1e-3 - err, check="triangle", value=s, oracle=oracle)
    rng = np.random.default_rng(seed)
    L2 = steiner_lipschitz_constant(2)
    worst_add = 0.0
    for _ in range(pairs):
        K1, K2 = _random_polygon(rng), _random_polygon(rng)
        s1, s2 = steiner_point(K1, cfg), steiner_point(K2, cfg)
        worst_add = max(worst_add, float(np.linalg.norm(steiner_point(MinkowskiSum(K1, K2), cfg) - s1 - s2)))
        h = hausdorff_distance(K1, K2)
        lhs = float(np.linalg.norm(s1 - s2))
        rep.add(L2 * h + 5e-3 - lhs, check="lipschitz", h=h, lhs=lhs, rhs=L2 * h)
    rep.add(1e-6 - worst_add, check="additivity", worst=worst_add)
    return rep.finalize()


# ---------------------------------------------------------------- manifests ----

def _kernel_from(doc, n1, n2):
    if "kernel" in doc:
        return AffineSubspace(np.zeros(n1 + n2), doc["kernel"])
    if "map" in doc:
        return LinearSurjection(doc["map"], n1).kernel
    return LinearSurjection.difference(n1).kernel


def run_manifest(doc: dict, threads: int = 1, cfg: SamplingCfg = DEFAULT_SAMPLING) -> Report:
    """Run one experiment description; the resolved manifest is embedded in the report."""
    try:
        kind = doc["experiment"]
    except (KeyError, TypeError) as exc:
        raise BodyLoadError("manifest has no 'experiment' entry") from exc
    seed = int(doc.get("seed", 42))
    started = time.perf_counter()
    try:
        if kind == "thm31":
            F1, F2 = family_from_dict(doc["family1"]), family_from_dict(doc["family2"])
            d1, d2 = F1(F1.t_min).dim, F2(F2.t_min).dim
            if d1 != d2:
                raise DimensionMismatch(f"family dimensions {d1} and {d2} differ")
            rep = verify_theorem_31(F1, F2, int(doc.get("pairs", 50)), seed, cfg, threads)
        elif kind == "ex31":
            rep = example_31_sharpness(float(doc.get("p", 2.0)), float(doc.get("t_min", 1e-4)),
                                       float(doc.get("t_max", 1e-2)), int(doc.get("scales", 10)))
        elif kind == "ex32":
            rep = example_32_stability(doc.get("x0", [3.0, 0.0]), _ex32_pairs(doc), cfg)
        elif kind == "lem32":
            F1, F2 = family_from_dict(doc["family1"]), family_from_dict(doc["family2"])
            n1, n2 = F1(F1.t_min).dim, F2(F2.t_min).dim
            kernel = _kernel_from(doc, n1, n2)
            if kernel.ambient_dim != n1 + n2:
                raise DimensionMismatch("kernel does not live in the product space")
            m = modulus_from_dict(doc.get("modulus"), F1(F1.t_min)) if "modulus" in doc else None
            rep = verify_lemma_32(F1, F2, kernel, m, int(doc.get("pairs", 50)), seed, cfg, threads)
        elif kind == "rem33":
            rep = _rem33(doc, cfg)
        elif kind == "split-sum":
            A, B = _body(doc["A"]), _body(doc["B"])
            if A.dim != B.dim:
                raise DimensionMismatch("A and B dimensions differ")
            m = modulus_from_dict(doc.get("modulus"), A) if "modulus" in doc else None
            rep = split_sum_experiment(A, B, int(doc.get("samples", 1000)), seed, m, int(doc.get("pairs", 100)))
        elif kind == "split-kernel":
            rep = _split_kernel_manifest(doc)
        elif kind == "steiner":
            rep = steiner_experiment(int(doc.get("pairs", 100)), seed, cfg)
        elif kind == "suite":
            rep = combine("suite", [run_manifest(m, threads, cfg) for m in doc["manifests"]])
        else:
            raise BodyLoadError(f"unknown experiment {kind!r}")
    except KeyError as exc:
        raise BodyLoadError(f"manifest entry missing: {exc}") from exc
    rep.parameters["manifest"] = doc
    rep.metadata["runtime_s"] = time.perf_counter() - started
    return rep


def _ex32_pairs(doc):
    if "pairs" in doc:
        return [(_body(a), _body(b)) for a, b in doc["pairs"]]
    sw = doc["sweep"]
    base = _body(sw["body"])
    direction = np.asarray(sw.get("direction", [0.0, 1.0]), float)
    return [(base, Translate(base, h * direction)) for h in sw["shifts"]]


def _rem33(doc, cfg):
    builtin = designed_projection_families()
    names = doc.get("families", list(builtin))
    reports = []
    for entry in names:
        if isinstance(entry, str):
            fam = builtin[entry]
            min_exp = 0.9 if entry == "translating_balls" else doc.get("min_exponent", 0.45)
        else:
            fam = family_from_dict(entry)
            min_exp = entry.get("min_exponent", doc.get("min_exponent", 0.45))
        r = remark_33_projection_holder(fam, scales=int(doc.get("scales", 10)), min_exponent=min_exp, cfg=cfg)
        r.name = f"rem33[{fam.name}]"
        reports.append(r)
    return reports[0] if len(reports) == 1 else combine("rem33", reports)


def _split_kernel_manifest(doc):
    if doc.get("configuration", "nearest_point") == "nearest_point" and "family1" not in doc:
        return split_kernel_nearest_point(_body(doc["A"]))
    F1, F2 = family_from_dict(doc["family1"]), family_from_dict(doc["family2"])
    n1 = F1(F1.t_min).dim
    L = LinearSurjection(doc["map"], n1) if "map" in doc else LinearSurjection.difference(n1)
    rep = Report("split-kernel", {"samples": doc.get("samples", 20)}, tolerance=0.0)
    C = parallelism_constant(L.kernel, n1)
    rep.parameters["C"] = C
    if not C > 1e-12:
        rep.notes.append("kernel is parallel to a factor (C = 0)")
        return rep.finalize(audit_ok=False)
    target = np.asarray(doc.get("selection", np.zeros(L.n_out)), float)
    for t in np.linspace(F1.t_min, F1.t_max, int(doc.get("samples", 20))):
        sel = split_kernel(F1, F2, L, lambda _t: target, t)
        c = sel.certificates
        rep.add(1e-9 - c["reconstruction"], t=t, check="reconstruction", error=c["reconstruction"])
        rep.add(1e-6 - max(c["defect_1"], c["defect_2"]), t=t, check="membership",
                error=max(c["defect_1"], c["defect_2"]))
    return rep.finalize()


# ----------------------------------------------------------- default suite ----

POWER_CAP2_STRONG_RADIUS = 3.25  # 1 / (least curvature of the parabolic arc), rounded up


def default_manifests(seed: int = 42) -> list:
    """Manifests of the standard verification suite."""
    unit = {"type": "pball", "center": [0.0, 0.0], "radius": 1.0}
    return [
        {"experiment": "thm31", "seed": seed, "pairs": 50,
         "family1": {"type": "constant", "body": {"type": "power_cap", "p": 2.0}, "t": [0.01, 0.25],
                     "modulus": {"kind": "strongly_convex_lower", "R": POWER_CAP2_STRONG_RADIUS}},
         "family2": {"type": "horizontal_line", "half_width": 1.5, "t": [0.01, 0.25]}},
        {"experiment": "thm31", "seed": seed, "pairs": 50,
         "family1": {"type": "translating", "body": unit, "velocity": [1.0, 0.0], "t": [0.0, 0.3],
                     "modulus": {"kind": "euclid_ball", "r": 1.0}},
         "family2": {"type": "translating", "body": unit, "velocity": [-1.0, 0.0], "t": [0.0, 0.3],
                     "modulus": {"kind": "euclid_ball", "r": 1.0}}},
        {"experiment": "ex31", "p": 2.0},
        {"experiment": "ex31", "p": 4.0},
        {"experiment": "ex32", "x0": [3.0, 0.0],
         "sweep": {"body": {"type": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
                   "direction": [0.0, 1.0], "shifts": [0.01, 0.02, 0.05, 0.1, 0.15, 0.2]}},
        {"experiment": "ex32", "x0": [3.0, 0.0],
         "pairs": [[unit, {"type": "pball", "center": [0.0, 0.1], "radius": 1.0}], [unit, unit]]},
        {"experiment": "lem32", "seed": seed, "pairs": 20,
         "family1": {"type": "translating", "body": unit, "velocity": [1.0, 0.0], "t": [0.0, 0.3]},
         "family2": {"type": "translating", "body": unit, "velocity": [1.0, 0.0], "t": [0.0, 0.3]},
         "modulus": {"kind": "euclid_ball", "r": 1.0}},
        {"experiment": "rem33"},
        {"experiment": "split-sum", "seed": seed, "samples": 1000,
         "A": {"type": "pball", "center": [3.0, 0.0], "radius": 1.0},
         "B": {"type": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
         "modulus": {"kind": "euclid_ball", "r": 1.0}},
        {"experiment": "split-kernel",
         "A": {"type": "ellipse", "center": [2.0, 1.0], "semi_axes": [1.0, 0.5], "angle": 0.3}},
        {"experiment": "steiner", "seed": seed, "pairs": 100},
    ]


def run_suite(seed: int = 42, threads: int = 1) -> Report:
    return run_manifest({"experiment": "suite", "seed": seed, "manifests": default_manifests(seed)}, threads)


__all__ = [
    "SetValuedFamily",
    "audit_modulus",
    "audit_omega",
    "constant_family",
    "default_manifests",
    "designed_projection_families",
    "example_31_sharpness",
    "example_32_stability",
    "family_from_dict",
    "fit_holder",
    "horizontal_line_family",
    "intersection_family",
    "modulus_from_dict",
    "pushed_vertex_family",
    "remark_33_projection_holder",
    "rotating_ellipse_family",
    "run_manifest",
    "run_suite",
    "split_kernel_nearest_point",
    "split_sum_experiment",
    "steiner_experiment",
    "translating_family",
    "verify_lemma_32",
    "verify_theorem_31",
]

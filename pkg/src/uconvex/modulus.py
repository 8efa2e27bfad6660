"""Modulus of convexity: estimation, tabulation, inverses and inequality checks."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, optimize

from .bodies import ConvexBody, Scale, diameter
from .bodies.base import _golden_min_vec, as_vector
from .errors import ChordNotRealizable, ConfigMissing, OutOfRange, OutsidePoint
from .report import DIAGNOSTIC, Report
from .sampling import DEFAULT_SAMPLING, circle_directions, sphere_directions


@dataclass(frozen=True)
class ModulusCfg:
    """Resolution of the modulus estimator.

    ``n_boundary`` angular boundary samples are paired in the plane and each
    crossing of the chord length through ``eps`` is refined until the chord
    is within ``chord_tol * eps`` of ``eps``.  In higher dimension pairs of
    ``n_boundary_nd`` sampled boundary points are accepted when their chord
    is within ``chord_tol_nd * eps``.
    """

    n_boundary: int = 2048
    chord_tol: float = 1e-4
    chord_iters: int = 40
    depth_dirs: int = 64
    depth_iters: int = 48
    n_boundary_nd: int = 1500
    chord_tol_nd: float = 1e-2
    depth_dirs_nd: int = 2048
    seed: int = DEFAULT_SAMPLING.seed

    def to_dict(self):
        return dict(self.__dict__)


DEFAULT_MODULUS = ModulusCfg()


# ---------------------------------------------------------------- depth ----

def _depth_many(body: ConvexBody, X, cfg: ModulusCfg = DEFAULT_MODULUS):
    """Inner-ball radius at each row of X (points assumed inside)."""
    X = np.atleast_2d(np.asarray(X, float))
    norm = body.norm
    exact_support = not body.approximate_support
    if body.dim == 2:
        n = cfg.depth_dirs
        U = circle_directions(n)
        h = 2.0 * np.pi / n
    else:
        U = sphere_directions(body.dim, cfg.depth_dirs_nd, cfg.seed)
    if exact_support:
        # distance to the supporting hyperplane with normal u, in the ambient norm
        S = body.support_values(U) / norm.dual_norm(U)
        Ud = U / norm.dual_norm(U)[:, None]
        G = S[None, :] - X @ Ud.T

        def gap(Xs, th):
            W = np.column_stack([np.cos(th), np.sin(th)])
            w = norm.dual_norm(W)
            return (body.support_values(W) - np.einsum("ij,ij->i", W, Xs)) / w
    else:
        scale = norm.norm(U)
        G = np.empty((len(X), len(U)))
        for j, u in enumerate(U):
            G[:, j] = body.ray_exit(X, np.broadcast_to(u, X.shape)) * scale[j]

        def gap(Xs, th):
            W = np.column_stack([np.cos(th), np.sin(th)])
            return body.ray_exit(Xs, W) * norm.norm(W)

    k = np.argmin(G, axis=1)
    coarse = G[np.arange(len(X)), k]
    if body.dim != 2:
        return np.maximum(coarse, 0.0)
    th0 = 2.0 * np.pi * k / n
    th = _golden_min_vec(lambda t: gap(X, t), th0 - h, th0 + h, iters=cfg.depth_iters)
    fine = gap(X, th)
    return np.maximum(np.minimum(coarse, fine), 0.0)


def depth(body: ConvexBody, x, cfg: ModulusCfg = DEFAULT_MODULUS) -> float:
    """``sup{r : B_r(x) ⊆ body}`` in the body's ambient norm."""
    x = as_vector(x, body.dim, "point")
    if not body.contains(x, tol=1e-9):
        raise OutsidePoint(f"{x} is not in {body!r}")
    return float(_depth_many(body, x[None, :], cfg)[0])


# ----------------------------------------------------------- estimation ----

@dataclass
class ModulusTable:
    """Tabulated nondecreasing modulus on an ascending grid.

    ``delta`` is the isotonic cleanup of ``raw``.  Evaluation interpolates
    linearly between grid points and is flat beyond the grid.  Below the
    first grid point nothing is known except positivity, so the table
    reads 0 there; this keeps it a lower bound for the small-ε regime.
    """

    eps: np.ndarray
    delta: np.ndarray
    raw: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eps = np.asarray(self.eps, float)
        self.delta = np.asarray(self.delta, float)
        if self.raw is None:
            self.raw = self.delta.copy()
        self.raw = np.asarray(self.raw, float)
        if self.eps.ndim != 1 or self.eps.shape != self.delta.shape or len(self.eps) == 0:
            raise ValueError("eps and delta must be equal-length 1-d arrays")
        if np.any(np.diff(self.eps) <= 0):
            raise ValueError("eps grid must be strictly increasing")

    @property
    def domain_max(self) -> float:
        return float(self.eps[-1])

    @property
    def sup(self) -> float:
        return float(np.nanmax(self.delta)) if np.any(np.isfinite(self.delta)) else 0.0

    def _knots(self):
        ok = np.isfinite(self.delta)
        return self.eps[ok], self.delta[ok]

    def __call__(self, e):
        xs, ys = self._knots()
        out = np.interp(np.asarray(e, float), xs, ys, left=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def inverse(self, y):
        """``sup{ε : δ(ε) <= y}`` over the tabulated function (right-continuous)."""
        y = float(y)
        if y < 0:
            raise OutOfRange("negative modulus value")
        if y == 0:
            return 0.0
        xs, ys = self._knots()
        if y > ys[-1] + 1e-15:
            raise OutOfRange(f"{y} exceeds the largest tabulated value {ys[-1]}")
        if y < ys[0]:
            return float(xs[0])
        k = int(np.searchsorted(ys, y, side="right")) - 1
        if k >= len(xs) - 1:
            return float(xs[-1])
        return float(xs[k] + (y - ys[k]) / (ys[k + 1] - ys[k]) * (xs[k + 1] - xs[k]))

    @property
    def raw_violations(self) -> float:
        """Largest decrease of the raw estimates along the grid."""
        r = self.raw[np.isfinite(self.raw)]
        return float(max(0.0, -np.min(np.diff(r)))) if len(r) > 1 else 0.0

    def to_dict(self):
        from .report import _plain

        return _plain({"eps": self.eps, "delta": self.delta, "raw": self.raw, "meta": self.meta})

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, indent=2)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_dict(cls, d):
        def arr(v):
            return np.array([float(x) for x in v])

        return cls(arr(d["eps"]), arr(d["delta"]), arr(d["raw"]) if "raw" in d else None, d.get("meta", {}))

    @classmethod
    def from_json(cls, src):
        text = Path(src).read_text() if not str(src).lstrip().startswith("{") else src
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "delta"])
        for e, d in zip(self.eps, self.delta):
            w.writerow([format(float(e), ".17g"), format(float(d), ".17g")])
        return buf.getvalue()

    def scaled(self, lam: float) -> "ModulusTable":
        """Table of ``lam * A`` from the table of A."""
        return ModulusTable(lam * self.eps, lam * self.delta, lam * self.raw, dict(self.meta, scaled=lam))


def _isotonic(y):
    ok = np.isfinite(y)
    out = np.array(y, float)
    if ok.sum() > 1:
        out[ok] = optimize.isotonic_regression(y[ok]).x
    return out


def _boundary_2d(body, theta):
    c = body.interior_point()
    D = np.column_stack([np.cos(theta), np.sin(theta)])
    t = body.ray_exit(np.broadcast_to(c, D.shape), D)
    return c + t[:, None] * D


def _chord_pairs_2d(body, eps, P, theta, norm, cfg):
    """Boundary pairs with chord exactly ``eps`` (within chord_tol * eps).

    For every grid point P_i the chord |P_j - P_i| changes sign relative to
    eps between consecutive j; each such bracket is refined on the angle of
    the second endpoint by the Illinois variant of regula falsi.
    """
    n = len(P)
    C = norm.norm(P[:, None, :] - P[None, :, :]) - eps
    nxt = np.roll(C, -1, axis=1)
    ii, jj = np.nonzero((C < 0) & (nxt >= 0) | (C >= 0) & (nxt < 0))
    if len(ii) == 0:
        return None
    a = theta[jj]
    b = a + 2.0 * np.pi / n
    fa, fb = C[ii, jj], nxt[ii, jj]
    X1 = P[ii]
    tol = cfg.chord_tol * eps
    side = np.zeros(len(ii))
    X2 = P[jj]
    for _ in range(cfg.chord_iters):
        with np.errstate(divide="ignore", invalid="ignore"):
            m = np.where(fb != fa, b - fb * (b - a) / (fb - fa), 0.5 * (a + b))
        m = np.where((m > a) & (m < b), m, 0.5 * (a + b))
        X2 = _boundary_2d(body, m)
        fm = norm.norm(X2 - X1) - eps
        if np.all(np.abs(fm) <= tol):
            break
        left = np.sign(fm) == np.sign(fa)
        # Illinois: halve the retained endpoint's value after a repeat
        fb = np.where(left & (side == 1), 0.5 * fb, fb)
        fa = np.where(~left & (side == -1), 0.5 * fa, fa)
        a, fa = np.where(left, m, a), np.where(left, fm, fa)
        b, fb = np.where(left, b, m), np.where(left, fb, fm)
        side = np.where(left, 1, -1)
    good = np.abs(norm.norm(X2 - X1) - eps) <= tol
    if not good.any():
        return None
    return X1[good], X2[good]


def _estimate_2d(body, eps_grid, cfg, strict):
    n = cfg.n_boundary
    theta = 2.0 * np.pi * np.arange(n) / n
    P = _boundary_2d(body, theta)
    norm = body.norm
    out, npairs = [], []
    for e in eps_grid:
        pairs = _chord_pairs_2d(body, e, P, theta, norm, cfg)
        if pairs is None:
            if strict:
                raise ChordNotRealizable(f"no boundary chord of length {e:g} in {body!r}")
            out.append(np.nan)
            npairs.append(0)
            continue
        X1, X2 = pairs
        M = 0.5 * (X1 + X2)
        out.append(float(np.min(_depth_many(body, M, cfg))))
        npairs.append(len(M))
    return np.array(out), npairs


def _estimate_nd(body, eps_grid, cfg, strict):
    c = body.interior_point()
    D = sphere_directions(body.dim, cfg.n_boundary_nd, cfg.seed)
    P = body.boundary_points(D, c)
    norm = body.norm
    out, npairs = [], []
    iu = np.triu_indices(len(P), 1)
    L = norm.norm(P[iu[0]] - P[iu[1]])
    for e in eps_grid:
        ok = np.abs(L - e) <= cfg.chord_tol_nd * e
        if not ok.any():
            if strict:
                raise ChordNotRealizable(f"no sampled chord of length {e:g} in {body!r}")
            out.append(np.nan)
            npairs.append(0)
            continue
        M = 0.5 * (P[iu[0][ok]] + P[iu[1][ok]])
        vals = [np.min(_depth_many(body, M[i : i + 512], cfg)) for i in range(0, len(M), 512)]
        out.append(float(min(vals)))
        npairs.append(int(ok.sum()))
    return np.array(out), npairs


def estimate_modulus(
    body: ConvexBody,
    eps_grid,
    cfg: ModulusCfg = DEFAULT_MODULUS,
    strict: bool = True,
) -> ModulusTable:
    """Estimate ``δ(ε)`` as the least midpoint depth over boundary chords of length ε.

    In the plane chords are exact to ``cfg.chord_tol`` relative accuracy;
    in higher dimension they come from sampled boundary pairs, so the
    estimate is biased upward (a UserWarning says so).  With
    ``strict=False`` unrealizable ε (at or beyond the diameter) give NaN
    entries listed in ``meta["unrealizable"]`` instead of raising.
    """
    eps_grid = np.asarray(eps_grid, float)
    if np.any(eps_grid <= 0):
        raise OutOfRange("eps must be positive")
    if body.dim == 2:
        raw, npairs = _estimate_2d(body, eps_grid, cfg, strict)
        method = "planar-exact-chords"
    else:
        warnings.warn(
            "modulus estimates in dimension >= 3 are upper-biased (sampled pairs and depths)",
            UserWarning,
            stacklevel=2,
        )
        raw, npairs = _estimate_nd(body, eps_grid, cfg, strict)
        method = "sampled-pairs"
    raw = np.maximum(raw, 0.0, where=np.isfinite(raw), out=raw.copy())
    meta = {
        "body": repr(body),
        "method": method,
        "cfg": cfg.to_dict(),
        "pairs": npairs,
        "unrealizable": [float(e) for e, r in zip(eps_grid, raw) if not np.isfinite(r)],
    }
    return ModulusTable(eps_grid, _isotonic(raw), raw, meta)


# ------------------------------------------------------ analytic moduli ----

@dataclass(frozen=True)
class AnalyticModulus:
    """Closed-form modulus with the parameters used by the continuity bounds.

    ``kind`` is one of ``"euclid_ball"`` (``param`` = radius r),
    ``"power"`` (``param`` = exponent p, δ = (ε/2)^p),
    ``"strongly_convex_lower"`` (``param`` = R, over ``ambient``) or
    ``"table"`` (wrapping a :class:`ModulusTable`).  ``r0``, ``delta0`` and
    ``M`` are the inner radius, the breakpoint value δ(2 r0) and the
    diameter bound; ``delta0`` defaults to δ(2 r0).
    """

    kind: str
    param: float | None = None
    domain_max: float | None = None
    r0: float | None = None
    delta0: float | None = None
    M: float | None = None
    ambient: "AnalyticModulus | None" = None
    table: ModulusTable | None = None

    def __post_init__(self):
        if self.kind not in ("euclid_ball", "power", "strongly_convex_lower", "table"):
            raise ValueError(f"unknown modulus kind {self.kind!r}")
        if self.domain_max is None:
            dm = {
                "euclid_ball": lambda: 2.0 * self.param,
                "power": lambda: 2.0,
                "strongly_convex_lower": lambda: 2.0 * self.param,
                "table": lambda: self.table.domain_max,
            }[self.kind]()
            object.__setattr__(self, "domain_max", float(dm))
        if self.delta0 is None and self.r0 is not None:
            object.__setattr__(self, "delta0", float(self(min(2.0 * self.r0, self.domain_max))))

    # constructors
    @classmethod
    def euclid_ball(cls, r=1.0, **kw):
        kw.setdefault("r0", r)
        kw.setdefault("M", 2.0 * r)
        return cls("euclid_ball", float(r), **kw)

    @classmethod
    def power(cls, p=2.0, **kw):
        return cls("power", float(p), **kw)

    @classmethod
    def strongly_convex_lower(cls, R, ambient=None, **kw):
        return cls("strongly_convex_lower", float(R), ambient=ambient or cls.euclid_ball(1.0), **kw)

    @classmethod
    def from_table(cls, table: ModulusTable, **kw):
        return cls("table", table=table, **kw)

    def with_params(self, **kw):
        d = dict(self.__dict__)
        d.update(kw)
        if "r0" in kw and "delta0" not in kw:
            d["delta0"] = None
        return AnalyticModulus(**d)

    @property
    def uniformly_convex(self) -> bool:
        return self.kind != "table"

    def __call__(self, e):
        e = np.asarray(e, float)
        if self.kind == "euclid_ball":
            r = self.param
            ec = np.minimum(e, 2.0 * r)
            v = r - np.sqrt(np.maximum(r * r - ec * ec / 4.0, 0.0))
        elif self.kind == "power":
            v = (np.maximum(e, 0.0) / 2.0) ** self.param
        elif self.kind == "strongly_convex_lower":
            R = self.param
            v = R * np.asarray(self.ambient(e / R))
        else:
            v = np.asarray(self.table(e))
        return float(v) if np.ndim(v) == 0 else v

    @property
    def sup(self) -> float:
        return float(self(self.domain_max))

    def inverse(self, y):
        y = float(y)
        if y < 0:
            raise OutOfRange("negative modulus value")
        if y == 0:
            return 0.0
        if y > self.sup * (1 + 1e-12) + 1e-300:
            raise OutOfRange(f"{y} exceeds sup of the modulus {self.sup}")
        if self.kind == "euclid_ball":
            r = self.param
            return float(min(2.0 * math.sqrt(max(r * r - (r - y) ** 2, 0.0)), self.domain_max))
        if self.kind == "power":
            return float(min(2.0 * y ** (1.0 / self.param), self.domain_max))
        if self.kind == "table":
            return self.table.inverse(y)
        if y >= self.sup:
            return self.domain_max
        return float(optimize.brentq(lambda e: self(e) - y, 0.0, self.domain_max, xtol=1e-15, rtol=1e-15))

    def to_dict(self):
        d = {"kind": self.kind, "param": self.param, "domain_max": self.domain_max,
             "r0": self.r0, "delta0": self.delta0, "M": self.M}
        if self.ambient is not None:
            d["ambient"] = self.ambient.to_dict()
        if self.table is not None:
            d["table"] = self.table.to_dict()
        return d


def _as_modulus(m):
    return m if isinstance(m, AnalyticModulus) else AnalyticModulus.from_table(m)


def inverse_modulus(m, y) -> float:
    """``sup{ε : δ(ε) <= y}``, with value 0 at y = 0."""
    return _as_modulus(m).inverse(y)


def phi(m, e):
    """``4 δ(ε) / ε``."""
    e = np.asarray(e, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(e > 0, 4.0 * np.asarray(m(e)) / e, 0.0)
    return float(v) if np.ndim(v) == 0 else v


def f_bound(m, x, delta0=None, M=None) -> float:
    """Continuity bound: ``δ⁻¹(x/2)`` below ``2Δ₀`` and ``M x / (2Δ₀)`` above."""
    mm = _as_modulus(m)
    delta0 = mm.delta0 if delta0 is None else delta0
    M = mm.M if M is None else M
    if delta0 is None or M is None:
        raise ConfigMissing("f_bound needs both delta0 and M")
    if not (delta0 > 0 and M > 0):
        raise ConfigMissing("delta0 and M must be positive")
    x = float(x)
    if x < 0:
        raise OutOfRange("f_bound is defined for x >= 0")
    if x < 2.0 * delta0:
        return mm.inverse(min(x / 2.0, mm.sup))
    return M * x / (2.0 * delta0)


def strongly_convex_lower(R: float, ambient, e):
    """``R δ_E(ε / R)``, the modulus lower bound of R-strongly convex sets."""
    return R * np.asarray(ambient(np.asarray(e, float) / R)) if np.ndim(e) else float(R * ambient(e / R))


# ------------------------------------------------------------ verifiers ----

def _grid_of(m, n=40):
    if isinstance(m, ModulusTable):
        return m.eps[np.isfinite(m.delta)]
    mm = _as_modulus(m)
    if mm.kind == "table":
        return mm.table.eps[np.isfinite(mm.table.delta)]
    return np.linspace(mm.domain_max / n, mm.domain_max * (1 - 1.0 / n), n)


def _is_table(m):
    return isinstance(m, ModulusTable) or (isinstance(m, AnalyticModulus) and m.kind == "table")


def _default_tol(m):
    return 2e-3 if _is_table(m) else 1e-6


def verify_scaling(m, lambdas=None, eps=None, tol=None) -> Report:
    """δ(λε) <= λ δ(ε) for λ in (0, 1]."""
    eps = _grid_of(m) if eps is None else np.asarray(eps, float)
    lambdas = np.linspace(0.1, 1.0, 10) if lambdas is None else np.asarray(lambdas, float)
    rep = Report("scaling", {"lambdas": lambdas, "eps": eps}, tolerance=_default_tol(m) if tol is None else tol)
    for e in eps:
        de = m(e)
        for lam in lambdas:
            lhs = m(lam * e)
            rep.add(lam * de - lhs, eps=e, lam=lam, lhs=lhs, rhs=lam * de)
    return rep.finalize()


def verify_monotonicity(m, eps=None, tol=None, strict=None) -> Report:
    """δ and δ/ε nondecreasing on the grid; strictness for uniformly convex moduli."""
    eps = _grid_of(m) if eps is None else np.asarray(eps, float)
    rep = Report("monotonicity", {"eps": eps}, tolerance=_default_tol(m) if tol is None else tol)
    d = np.asarray(m(eps), float)
    ratio = d / eps
    for k in range(len(eps) - 1):
        rep.add(min(d[k + 1] - d[k], ratio[k + 1] - ratio[k]), eps=eps[k + 1],
                d_step=d[k + 1] - d[k], ratio_step=ratio[k + 1] - ratio[k])
    strict = (isinstance(m, AnalyticModulus) and m.uniformly_convex) if strict is None else strict
    flat = bool(np.any(np.diff(d) <= 0))
    if flat:
        rep.notes.append("non-strict: the modulus is flat somewhere on the grid")
    if strict and (flat or np.any(d <= 0)):
        rep.add(-math.inf, eps=float("nan"), d_step=0.0, ratio_step=0.0)
        rep.notes.append("strict monotonicity required but violated")
    rep.parameters["strict"] = strict
    return rep.finalize()


def verify_diameter_bound(body, m, eps=None, diam=None) -> Report:
    """``diam <= ([ε/δ(ε)] + 1) ε`` wherever δ(ε) > 0."""
    eps = _grid_of(m) if eps is None else np.asarray(eps, float)
    diam = diameter(body) if diam is None else diam
    rep = Report("diameter_bound", {"eps": eps, "diameter": diam}, tolerance=1e-9)
    skipped = 0
    for e in eps:
        d = float(m(e))
        if not d > 0:
            skipped += 1
            continue
        N = math.floor(e / d) + 1
        rep.add(N * e - diam, eps=e, delta=d, N=N, bound=N * e)
    if skipped:
        rep.notes.append(f"skipped {skipped} grid points with zero modulus")
    rep.parameters["skipped"] = skipped
    return rep.finalize()


def verify_quadratic_cap(body, m, eps=None, diam=None, tol=1e-9) -> Report:
    """``δ(ε) <= ε² / (diam - ε)`` for ε < diam."""
    eps = _grid_of(m) if eps is None else np.asarray(eps, float)
    diam = diameter(body) if diam is None else diam
    rep = Report("quadratic_cap", {"eps": eps, "diameter": diam}, tolerance=tol)
    for e in eps[eps < diam]:
        d = float(m(e))
        cap = e * e / (diam - e)
        rep.add(cap - d, eps=e, delta=d, cap=cap)
    return rep.finalize()


def day_nordlander_rhs(e):
    e = np.asarray(e, float)
    return 0.5 * (1.0 - np.sqrt(1.0 - e * e))


def verify_day_nordlander(body, m=None, eps=None, r0=None, cfg: ModulusCfg = DEFAULT_MODULUS,
                          tol=2e-3, diam=None) -> Report:
    """``δ_B(2 r0 ε) <= (1 - sqrt(1 - ε²)) / 2`` for B the body rescaled to diameter 1.

    ``m`` is a modulus of the body as given (estimated if omitted); ``r0``
    an inner radius of the rescaled body, checked against the depth of its
    interior point.  The report's ``equality_gap`` is the largest
    |LHS - RHS|, which vanishes for Euclidean balls.
    """
    diam = diameter(body) if diam is None else diam
    scaled = Scale(body, 1.0 / diam)
    r_meas = depth(scaled, scaled.interior_point(), cfg)
    r0 = r_meas if r0 is None else float(r0)
    eps = np.linspace(0.1, 0.9, 9) if eps is None else np.asarray(eps, float)
    rep = Report("day_nordlander", {"eps": eps, "r0": r0, "diameter": diam}, tolerance=tol)
    if r_meas < r0 - 1e-9:
        rep.notes.append(f"declared r0={r0:.6g} exceeds measured depth {r_meas:.6g}")
        rep.finalize(audit_ok=False)
        return rep
    chords = 2.0 * r0 * eps * diam
    if m is None:
        m = estimate_modulus(body, chords, cfg, strict=False)
    gap = 0.0
    for e, ch in zip(eps, chords):
        lhs = float(m(ch)) / diam
        rhs = float(day_nordlander_rhs(e))
        gap = max(gap, abs(lhs - rhs))
        rep.add(rhs - lhs, eps=e, lhs=lhs, rhs=rhs)
    rep.parameters["equality_gap"] = gap
    return rep.finalize()


def verify_supporting_continuity(body, m, trials=1000, seed=42, tol=1e-3) -> Report:
    """``φ(||x1 - x2||) <= ||p1 - p2||_*`` for support points x_i of unit functionals p_i.

    Half the pairs are independent, half are small perturbations so that
    the regime of nearby functionals is exercised as well.
    """
    rng = np.random.default_rng(seed)
    norm = body.norm
    n = body.dim
    P1 = rng.standard_normal((trials, n))
    P2 = rng.standard_normal((trials, n))
    half = trials // 2
    P2[half:] = P1[half:] + 10.0 ** rng.uniform(-4, 0, (trials - half, 1)) * P2[half:]
    P1 = norm.normalize_dual(P1)
    P2 = norm.normalize_dual(P2)
    X1, X2 = body.support_points(P1), body.support_points(P2)
    chord = norm.norm(X1 - X2)
    lhs = np.asarray(phi(m, chord))
    rhs = norm.dual_norm(P1 - P2)
    rep = Report("supporting_continuity", {"trials": trials, "seed": seed}, tolerance=tol)
    for L, R, c in zip(lhs, rhs, chord):
        rep.add(R - L, chord=c, lhs=L, rhs=R)
    return rep.finalize()


def verify_strongly_convex(body, m, eps=None, tol=2e-3) -> Report:
    """Estimated modulus of an R-ball intersection dominates ``R δ_E(ε/R)``."""
    eps = _grid_of(m) if eps is None else np.asarray(eps, float)
    lower = AnalyticModulus.strongly_convex_lower(body.R)
    rep = Report("strongly_convex_lower", {"R": body.R, "eps": eps}, tolerance=tol)
    for e in eps:
        lo = float(lower(e))
        d = float(m(e))
        rep.add(d - lo, eps=e, delta=d, lower=lo)
    if body.dim >= 3:
        rep.notes.append("lower-bound check uses upper-biased estimates in dimension >= 3")
    return rep.finalize()


def integral_diagnostic(m, eps=None) -> Report:
    """Ratio ``δ(ε) / ∫_0^{ε/2} φ(t) dt`` (no verdict: the constant is unknown)."""
    eps = _grid_of(m) if eps is None else np.asarray(eps, float)
    rep = Report("integral_ratio", {"eps": eps}, status=DIAGNOSTIC)
    for e in eps:
        I, _ = integrate.quad(lambda t: float(phi(m, t)), 0.0, e / 2.0, limit=200)
        d = float(m(e))
        rep.add(eps=e, delta=d, integral=I, ratio=d / I if I > 0 else math.nan)
    return rep


def verify_battery(body, m, diam=None, expect_uniformly_convex=True, trials=1000, seed=42,
                   day_nordlander=True, continuity_tol=1e-3) -> Report:
    """All modulus inequalities for one body, combined into a single report."""
    from .report import combine

    diam = diameter(body) if diam is None else diam
    checks = [
        verify_scaling(m),
        verify_monotonicity(m),
        verify_diameter_bound(body, m, diam=diam),
        verify_quadratic_cap(body, m, diam=diam, tol=_default_tol(m)),
    ]
    if day_nordlander:
        checks.append(verify_day_nordlander(body, m, diam=diam))
    eps_pos = _grid_of(m)
    positive = bool(np.all(np.asarray(m(eps_pos)) > 0))
    if expect_uniformly_convex and positive:
        checks.append(verify_supporting_continuity(body, m, trials, seed, continuity_tol))
    out = combine(f"battery[{body!r}]", checks)
    if not positive:
        out.notes.append("non-strict: modulus vanishes on part of the grid")
        if expect_uniformly_convex:
            out.status = "fail"
    return out

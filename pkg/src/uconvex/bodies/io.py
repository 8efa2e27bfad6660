"""JSON descriptions of bodies.

A document has the form ``{"space": {"dim": n, "p": 2.0}, "body": {...}}``
where the body object carries a ``"type"`` tag and type-specific fields.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from ..errors import BodyLoadError
from .base import ConvexBody
from .composite import Intersection, MinkowskiSum, Product, Scale, Symmetrized, Translate
from .primitives import BallIntersection, Ellipsoid, PBall, Point, Polytope, PowerCap, Segment


def _p(value):
    return math.inf if value in ("inf", "Infinity") else float(value)


def body_from_dict(spec: dict, p: float = 2.0) -> ConvexBody:
    try:
        kind = spec["type"]
    except (KeyError, TypeError) as exc:
        raise BodyLoadError(f"body entry has no type: {spec!r}") from exc
    p = _p(spec.get("p", p)) if kind != "power_cap" else p
    try:
        if kind == "pball":
            return PBall(spec["center"], spec["radius"], p)
        if kind == "ball_intersection":
            return BallIntersection(spec["R"], spec["centers"])
        if kind == "power_cap":
            return PowerCap(spec["p"])
        if kind in ("polygon", "polytope"):
            return Polytope(spec["vertices"], p)
        if kind == "segment":
            return Segment(spec["a"], spec["b"], p)
        if kind == "point":
            return Point(spec["x"], p)
        if kind in ("ellipsoid", "ellipse"):
            if "shape" in spec:
                return Ellipsoid(spec["center"], spec["shape"])
            return Ellipsoid.ellipse(spec["center"], spec["semi_axes"], spec.get("angle", 0.0))
        if kind == "minkowski_sum":
            return MinkowskiSum(*[body_from_dict(s, p) for s in spec["parts"]])
        if kind == "intersection":
            return Intersection(*[body_from_dict(s, p) for s in spec["parts"]])
        if kind == "symmetrized":
            return Symmetrized(body_from_dict(spec["inner"], p))
        if kind == "translate":
            return Translate(body_from_dict(spec["inner"], p), spec["offset"])
        if kind == "scale":
            return Scale(body_from_dict(spec["inner"], p), spec["factor"])
        if kind == "product":
            first, second = (body_from_dict(s, p) for s in spec["parts"])
            return Product(first, second)
    except BodyLoadError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise BodyLoadError(f"bad {kind!r} body: {exc}") from exc
    raise BodyLoadError(f"unknown body type {kind!r}")


def load_body(doc) -> ConvexBody:
    """Build a body from a document (dict), a JSON string, or a file path."""
    if isinstance(doc, (str, Path)) and not str(doc).lstrip().startswith("{"):
        try:
            doc = Path(doc).read_text()
        except OSError as exc:
            raise BodyLoadError(f"cannot read {doc}: {exc}") from exc
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise BodyLoadError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "body" not in doc:
        raise BodyLoadError("document needs a 'body' entry")
    space = doc.get("space", {})
    body = body_from_dict(doc["body"], _p(space.get("p", 2.0)))
    if "dim" in space and int(space["dim"]) != body.dim:
        raise BodyLoadError(
            f"declared dimension {space['dim']} does not match body dimension {body.dim}"
        )
    return body


def body_to_dict(body: ConvexBody) -> dict:
    p = body.norm.p
    return {
        "space": {"dim": body.dim, "p": "inf" if math.isinf(p) else p},
        "body": body.to_dict(),
    }


def dump_body(body: ConvexBody, path=None) -> str:
    text = json.dumps(body_to_dict(body), sort_keys=True, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


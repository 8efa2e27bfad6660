"""Command-line front end: ``uconvex modulus | verify | experiment``.

Exit codes: 0 pass, 1 a check failed, 2 bad input, 3 numeric failure,
4 inconclusive (a hypothesis audit failed).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bodies import diameter, load_body
from .errors import BodyLoadError, DimensionMismatch, KernelParallel, UConvexError
from .experiments import run_manifest
from .modulus import DEFAULT_MODULUS, ModulusTable, estimate_modulus, verify_battery
from .report import FAIL, INCONCLUSIVE, PASS

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

log = logging.getLogger("uconvex")


def parse_eps(text: str) -> np.ndarray:
    """``MIN:MAX:COUNT[:log]`` -> grid of chord lengths."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "linear")):
        raise argparse.ArgumentTypeError("expected MIN:MAX:COUNT[:log]")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if n < 2 or not 0 < lo < hi:
        raise argparse.ArgumentTypeError("need 0 < MIN < MAX and COUNT >= 2")
    if len(parts) == 4 and parts[3] == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uconvex", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="output file (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=None, help="random seed (default 42)")
    common.add_argument("--samples", type=_positive(int), help="number of random samples or pairs")
    common.add_argument("--tol", type=_positive(float), help="tolerance override")
    common.add_argument("--threads", type=_positive(int), default=1)
    common.add_argument("--comparison", action="store_true",
                        help="omit run-dependent metadata so outputs compare byte for byte")
    common.add_argument("-v", "--verbose", action="store_true")

    m = sub.add_parser("modulus", parents=[common], help="estimate the modulus of convexity of a body")
    m.add_argument("--body", required=True)
    m.add_argument("--eps", type=parse_eps, help="MIN:MAX:COUNT[:log] (default: 20 points up to 0.95 diam)")

    v = sub.add_parser("verify", parents=[common], help="run the modulus inequality battery on a body")
    v.add_argument("--body", required=True)
    v.add_argument("--eps", type=parse_eps)
    v.add_argument("--table", type=Path, help="check this modulus table instead of estimating one")
    v.add_argument("--expect-not-uniformly-convex", action="store_true",
                   help="a vanishing modulus is reported as a finding, not a failure")

    e = sub.add_parser("experiment", parents=[common], help="run an experiment manifest")
    e.add_argument("--manifest", required=True, type=Path)
    return ap


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def _default_grid(body):
    d = diameter(body)
    return np.linspace(d / 20.0, 0.95 * d, 20)


def cmd_modulus(args) -> int:
    body = load_body(args.body)
    eps = args.eps if args.eps is not None else _default_grid(body)
    cfg = DEFAULT_MODULUS if args.tol is None else _with(DEFAULT_MODULUS, chord_tol=args.tol)
    table = estimate_modulus(body, eps, cfg, strict=False)
    table.meta["config"] = _config(args)
    bad = table.meta.get("unrealizable", [])
    if bad:
        log.warning("%d grid values are not realizable as chords and are flagged", len(bad))
    _emit(table.to_csv() if args.format == "csv" else table.to_json(), args.out)
    return EXIT_PASS


def cmd_verify(args) -> int:
    body = load_body(args.body)
    if args.table is not None:
        try:
            m = ModulusTable.from_json(args.table)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise BodyLoadError(f"cannot read modulus table: {exc}") from exc
    else:
        m = estimate_modulus(body, args.eps if args.eps is not None else _default_grid(body), strict=False)
    seed = 42 if args.seed is None else args.seed
    rep = verify_battery(body, m, expect_uniformly_convex=not args.expect_not_uniformly_convex,
                         trials=args.samples or 1000, seed=seed,
                         continuity_tol=1e-3 if args.tol is None else args.tol)
    rep.parameters["config"] = _config(args)
    _write_report(rep, args)
    for n in rep.notes:
        log.info("%s", n)
    return EXIT_PASS if rep.status == PASS else EXIT_FAIL


def cmd_experiment(args) -> int:
    try:
        doc = json.loads(args.manifest.read_text())
    except OSError as exc:
        raise BodyLoadError(f"cannot read {args.manifest}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BodyLoadError(f"malformed manifest: {exc}") from exc
    if not isinstance(doc, dict):
        raise BodyLoadError("manifest must be a JSON object")
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.samples is not None:
        for key in ("pairs", "samples"):
            if key in doc:
                doc[key] = args.samples
    try:
        rep = run_manifest(doc, threads=args.threads)
    except KernelParallel as exc:
        log.error("%s", exc)
        return EXIT_INCONCLUSIVE
    rep.parameters["config"] = _config(args)
    _write_report(rep, args)
    return {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}.get(rep.status, EXIT_PASS)


def _with(cfg, **kw):
    from dataclasses import replace

    return replace(cfg, **kw)


# where and how a run executes, not what it computes; kept out of comparison output
RUNTIME_FIELDS = ("out", "threads", "verbose")


def _config(args) -> dict:
    d = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in RUNTIME_FIELDS}
    if isinstance(d.get("eps"), np.ndarray):
        d["eps"] = d["eps"].tolist()
    return d


def _write_report(rep, args):
    rep.metadata["invocation"] = {k: str(getattr(args, k)) for k in RUNTIME_FIELDS}
    _emit(rep.to_csv() if args.format == "csv" else rep.to_json(comparison=args.comparison), args.out)


COMMANDS = {"modulus": cmd_modulus, "verify": cmd_verify, "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="uconvex: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (BodyLoadError, DimensionMismatch) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except (UConvexError, FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Structured results of verifications and experiments."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

PASS, FAIL, INCONCLUSIVE, DIAGNOSTIC = "pass", "fail", "inconclusive", "diagnostic"


def _plain(x):
    """Convert numpy containers and scalars into JSON-ready Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def format_float(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class Report:
    """Outcome of one check: per-sample records, worst margin, verdict.

    ``status`` is ``"pass"`` iff every margin is at least ``-tolerance``;
    ``"inconclusive"`` marks runs whose hypotheses could not be confirmed
    and ``"diagnostic"`` runs that carry no verdict.  ``metadata`` holds
    run-dependent data (timings) and is left out in comparison mode.
    """

    name: str
    parameters: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    status: str = PASS
    worst_margin: float = math.inf
    tolerance: float = 0.0
    notes: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def add(self, margin=None, **fields):
        rec = dict(fields)
        if margin is not None:
            rec["margin"] = float(margin)
            self.worst_margin = min(self.worst_margin, float(margin))
        self.records.append(rec)
        return rec

    def finalize(self, audit_ok: bool = True):
        """Set the verdict from the recorded margins."""
        if self.status == DIAGNOSTIC:
            return self
        if not audit_ok:
            self.status = INCONCLUSIVE
        elif self.worst_margin >= -self.tolerance:
            self.status = PASS
        else:
            self.status = FAIL
        return self

    def to_dict(self, comparison: bool = False) -> dict:
        d = {
            "name": self.name,
            "parameters": self.parameters,
            "records": self.records,
            "status": self.status,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "notes": self.notes,
        }
        if not comparison:
            d["metadata"] = self.metadata
        return _plain(d)

    def to_json(self, comparison: bool = False) -> str:
        return json.dumps(self.to_dict(comparison), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        """One row per record; columns are the union of record keys."""
        keys = sorted({k for r in self.records for k in r})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in self.records:
            w.writerow([format_float(_plain(r.get(k, ""))) if not isinstance(r.get(k), (list, dict))
                        else json.dumps(_plain(r[k])) for k in keys])
        return buf.getvalue()

    def summary(self) -> str:
        return f"{self.name}: {self.status} (worst margin {self.worst_margin:.3g}, tol {self.tolerance:.3g})"


def combine(name: str, reports, parameters=None) -> Report:
    """Aggregate sub-reports; the worst verdict wins."""
    reports = list(reports)
    out = Report(name, parameters or {})
    out.records = [{"check": r.name, "status": r.status, "worst_margin": r.worst_margin} for r in reports]
    out.worst_margin = min((r.worst_margin for r in reports if r.status != DIAGNOSTIC), default=math.inf)
    statuses = {r.status for r in reports}
    if FAIL in statuses:
        out.status = FAIL
    elif INCONCLUSIVE in statuses:
        out.status = INCONCLUSIVE
    else:
        out.status = PASS
    out.notes = [f"{r.name}: {n}" for r in reports for n in r.notes]
    out.parameters["checks"] = [r.to_dict(comparison=True) for r in reports]
    return out

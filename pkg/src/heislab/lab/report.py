"""Report containers and deterministic CSV/JSON emission."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

__all__ = ["Check", "Report", "ScalingReport", "EstimateReport", "emit_report", "render"]


@dataclass
class Check:
    """One pass/fail line: ``measured`` compared against ``threshold``."""

    name: str
    measured: float
    threshold: float | str
    passed: bool
    note: str = ""


@dataclass
class Report:
    """Rows share the column order of ``columns``; checks decide the exit code."""

    name: str
    columns: tuple[str, ...]
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_row(self, **values):
        missing = set(self.columns) - set(values)
        extra = set(values) - set(self.columns)
        if missing or extra:
            raise KeyError(f"row mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        self.rows.append(values)

    def check(self, name, measured, threshold, passed, note=""):
        c = Check(name, float(measured), threshold, bool(passed), note)
        self.checks.append(c)
        return c


@dataclass
class ScalingReport(Report):
    """Sweep rows plus fitted and oracle slopes in ``meta``."""


@dataclass
class EstimateReport(Report):
    """Per-sample ratios; ``meta`` holds the max ratio per grid and seed."""


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return repr(v)
    if isinstance(v, complex):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and (math.isnan(v) or math.isinf(v)):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if hasattr(v, "item"):  # numpy scalar
        return _jsonable(v.item())
    return v


def render(reports, fmt: str, header: dict) -> str:
    """Serialize reports; identical inputs give identical text."""
    if fmt == "json":
        doc = {
            "meta": _jsonable(header),
            "reports": [
                {
                    "name": r.name,
                    "meta": _jsonable(r.meta),
                    "columns": list(r.columns),
                    "rows": [[_jsonable(row[c]) for c in r.columns] for row in r.rows],
                    "checks": [
                        {"name": c.name, "measured": _jsonable(c.measured),
                         "threshold": _jsonable(c.threshold), "passed": c.passed, "note": c.note}
                        for c in r.checks
                    ],
                    "passed": r.passed,
                }
                for r in reports
            ],
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for k in sorted(header):
        buf.write(f"# {k}: {_fmt(header[k])}\n")
    for r in reports:
        buf.write(f"# report: {r.name}\n")
        for k in sorted(r.meta):
            buf.write(f"# {r.name}.{k}: {_fmt(r.meta[k])}\n")
        w.writerow(r.columns)
        for row in r.rows:
            w.writerow([_fmt(row[c]) for c in r.columns])
        w.writerow(["check", "measured", "threshold", "passed", "note"])
        for c in r.checks:
            w.writerow([c.name, _fmt(c.measured), _fmt(c.threshold), _fmt(c.passed), c.note])
    return buf.getvalue()


def emit_report(reports, path=None, fmt: str = "csv", header: dict | None = None) -> str:
    """Render and optionally write to ``path``.

    Raises
    ------
    OSError
        With the offending path in the message.
    """
    text = render(list(reports), fmt, header or {})
    if path is not None:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text

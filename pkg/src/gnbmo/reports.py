"""CSV and JSON serialization of inequality reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Sequence

from .verifiers import FACTOR_KEYS, InequalityReport

COLUMNS = (
    "statement_id", "domain", "field", "d", "s", "p", "s1", "p1", "k1", "sigma1", "h",
    "lhs", "bmo", "grad_norm", "gagliardo_s1p1", "kappa", "blowup_factor", "rhs_product",
    "ratio", "error_estimate", "runtime_ms", "bias_notes",
)


def round12(x: float) -> float:
    return float(f"{x:.12g}")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)


def report_row(report: InequalityReport, include_runtime: bool = False) -> dict:
    """Column name -> value (floats rounded to 12 significant digits).

    ``rhs_product`` is the product of the rounded factor columns, kept at
    full double precision so the row is self-consistent as written.
    """
    ex = report.exponents
    row = dict.fromkeys(COLUMNS)
    row.update(statement_id=report.statement_id, domain=report.domain, field=report.field,
               d=report.dimension, h=report.h, lhs=report.lhs, bias_notes=report.bias_notes)
    if ex is not None:
        row.update(s=ex.s, p=ex.p, s1=ex.s1, p1=ex.p1, k1=ex.k1, sigma1=ex.sigma1)
    if report.skipped is None:
        product = 1.0
        for key in FACTOR_KEYS:
            if key in report.rhs_factors:
                row[key] = round12(float(report.rhs_factors[key]))
                product *= row[key]
        row["rhs_product"] = product
        row["ratio"] = report.ratio
    row["error_estimate"] = report.error_estimate
    if include_runtime:
        row["runtime_ms"] = report.runtime_ms
    for key, val in row.items():
        if key == "rhs_product":
            continue
        if isinstance(val, float):
            row[key] = round12(val)
        elif val is not None and key not in ("statement_id", "domain", "field", "bias_notes", "d", "k1"):
            row[key] = round12(float(val))
    if row["k1"] is not None:
        row["k1"] = int(row["k1"])
    return row


def to_csv(reports: Sequence[InequalityReport], include_runtime: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for rep in reports:
        row = report_row(rep, include_runtime)
        writer.writerow([repr(row[c]) if c == "rhs_product" and row[c] is not None else fmt(row[c])
                         for c in COLUMNS])
    return buf.getvalue()


def to_json(reports: Sequence[InequalityReport], meta: dict | None = None, include_runtime: bool = False) -> str:
    doc = dict(meta or {})
    doc["reports"] = []
    for rep in reports:
        row = report_row(rep, include_runtime)
        row["passed"] = rep.passed
        row["skipped"] = rep.skipped
        doc["reports"].append(row)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(reports: Sequence[InequalityReport], format: str = "csv", path: str | Path | None = None,
                meta: dict | None = None, include_runtime: bool = False) -> str:
    """Serialize ``reports``; write atomically when ``path`` is given."""
    if not reports:
        raise ValueError("no reports to emit")
    if format == "csv":
        text = to_csv(reports, include_runtime)
    elif format == "json":
        text = to_json(reports, meta, include_runtime)
    else:
        raise ValueError(f"unknown format {format!r}")
    if path is not None:
        write_atomic(path, text)
    return text

"""Canonical JSON and CSV output for reports.

JSON is written with sorted keys and no insignificant whitespace, so equal
reports are byte-identical.  All numbers are decimal strings.
"""

from __future__ import annotations

import csv
import io
import json
import re

from .dualgroup import ArithContext
from .errors import BadInput
from .exactalg import IntPoly, format_cyclotomic, cyclotomic_factorization
from .fingrp import FqMatrix, GroupSpecFin, make_field
from .moduli import (
    SemidirectData,
    TameParameterPoint,
    TwistAut,
    check_point_bounds,
    tangent_report,
)
from .moduli.points import LElement

POINT_COLUMNS = ["F0", "sigma0", "ss", "ss_k", "u", "u_k", "dim", "h0", "unobstructed",
                 "jordan_ok", "unipotent_ok", "estimate_ok"]


def dumps(report) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def poly_report(p: IntPoly) -> dict:
    mult, rem = cyclotomic_factorization(p)
    return {"coeffs": p.to_json(), "text": str(p), "cyclotomic": format_cyclotomic(mult, rem)}


# ---------------------------------------------------------------------------
# matrices and points


def matrix_rows(g: FqMatrix) -> list[list[str]]:
    n = g.n
    return [[str(g.entries[i * n + j]) for j in range(n)] for i in range(n)]


def matrix_from_rows(rows, field) -> FqMatrix:
    return FqMatrix.from_rows([[int(x) for x in r] for r in rows], field)


def sd_to_json(sd: SemidirectData) -> dict:
    return sd.to_json()


def sd_from_json(data: dict) -> SemidirectData:
    return SemidirectData(TwistAut.from_json(data.get("theta_fr")), TwistAut.from_json(data.get("theta_s")),
                          int(data["q"]))


def spec_from_json(data: dict) -> GroupSpecFin:
    return GroupSpecFin(data["kind"], int(data["n"]), make_field(int(data["ell"]), int(data["k"])))


def point_to_json(pt: TameParameterPoint, ctx: ArithContext | None = None, chi: IntPoly | None = None) -> dict:
    out = {
        "F0": matrix_rows(pt.F0),
        "sigma0": matrix_rows(pt.sigma0),
        "ss": {"g": matrix_rows(pt.sigma_ss.g), "k": str(pt.sigma_ss.k)},
        "u": {"g": matrix_rows(pt.sigma_u.g), "k": str(pt.sigma_u.k)},
    }
    t = tangent_report(pt)
    out["tangent"] = {"dim": str(t.dim_tangent), "h0": str(t.dim_h0_twist), "unobstructed": t.unobstructed}
    if ctx is not None and chi is not None:
        b = check_point_bounds(pt, ctx, chi)
        out["bounds"] = {"jordan_ok": b.jordan_ok, "unipotent_ok": b.unipotent_ok, "estimate_ok": b.estimate_ok}
    return out


def point_from_json(data: dict, spec: GroupSpecFin, sd: SemidirectData) -> TameParameterPoint:
    F = spec.field
    ss = LElement(matrix_from_rows(data["ss"]["g"], F), int(data["ss"]["k"]))
    u = LElement(matrix_from_rows(data["u"]["g"], F), int(data["u"]["k"]))
    return TameParameterPoint(matrix_from_rows(data["F0"], F), matrix_from_rows(data["sigma0"], F), spec, sd, ss, u)


def points_report(points: list[TameParameterPoint], spec: GroupSpecFin, sd: SemidirectData,
                  ctx: ArithContext | None = None, chi: IntPoly | None = None) -> dict:
    if not points:
        return {"points": []}
    return {"spec": spec.to_json(), "sd": sd_to_json(sd),
            "points": [point_to_json(p, ctx, chi) for p in points]}


# ---------------------------------------------------------------------------
# CSV


def _matrix_cell(rows) -> str:
    return "|".join(" ".join(r) for r in rows)


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, list):
        return ";".join(_cell(v) for v in x)
    if isinstance(x, dict):
        return dumps(x)
    if x is None:
        return ""
    return str(x)


def _flatten(prefix: str, value, out: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    else:
        out.append((prefix, _cell(value)))


def to_csv(report: dict) -> str:
    """Point reports use POINT_COLUMNS; other reports become sorted key,value rows.

    Matrices in point rows are written row by row, entries separated by spaces
    and rows by "|".
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "points" in report:
        w.writerow(POINT_COLUMNS)
        for p in report["points"]:
            tangent = p.get("tangent", {})
            bounds = p.get("bounds", {})
            w.writerow([_matrix_cell(p["F0"]), _matrix_cell(p["sigma0"]), _matrix_cell(p["ss"]["g"]), p["ss"]["k"],
                        _matrix_cell(p["u"]["g"]), p["u"]["k"], tangent.get("dim", ""), tangent.get("h0", ""),
                        _cell(tangent.get("unobstructed", "")), _cell(bounds.get("jordan_ok", "")),
                        _cell(bounds.get("unipotent_ok", "")), _cell(bounds.get("estimate_ok", ""))])
        return buf.getvalue()
    rows = []
    _flatten("", report, rows)
    w.writerow(["key", "value"])
    for k, v in rows:
        w.writerow([k, v])
    return buf.getvalue()


def emit_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    if fmt == "csv":
        return to_csv(report)
    raise BadInput(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# parsing helpers shared with the CLI

_GROUP_RE = re.compile(r"(GL|SL|Sp|T|U)(\d+)")


def parse_group(label: str, ell: int, k: int) -> GroupSpecFin:
    m = _GROUP_RE.fullmatch(label.strip())
    if not m:
        raise BadInput(f"cannot parse group {label!r}")
    return GroupSpecFin(m.group(1), int(m.group(2)), make_field(ell, k))


def parse_int_matrix(text: str) -> list[list[int]]:
    """'a,b;c,d' -> [[a, b], [c, d]]."""
    try:
        rows = [[int(x) for x in r.split(",")] for r in text.strip().split(";") if r.strip()]
    except ValueError as exc:
        raise BadInput(f"cannot parse matrix {text!r}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise BadInput(f"matrix {text!r} must be square")
    return rows

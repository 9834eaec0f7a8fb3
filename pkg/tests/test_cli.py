import csv
import io
import json
import subprocess
import sys

import pytest

from langparams.cli import run
from langparams.exactalg import IntPoly
from langparams.fingrp import GroupSpecFin, make_field
from langparams.moduli import SemidirectData, relation_holds
from langparams.serialize import (
    POINT_COLUMNS,
    emit_report,
    point_from_json,
    points_report,
    sd_from_json,
    spec_from_json,
)

T = IntPoly.T()


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, err = call(capsys, *argv)
    assert code == 0, err
    return json.loads(out), out


def poly(data):
    return IntPoly.from_json(data["coeffs"])


# ---------------------------------------------------------------------------
# commands


def test_chi_triality(capsys):
    report, _ = call_json(capsys, "chi", "--type", "SO8^3")
    assert poly(report["chi"]) == (T ** 2 - 1) * (T ** 6 - 1) * (T ** 8 + T ** 4 + 1)
    assert report["h"] == "12"
    assert poly(report["chi_prime"]) == T ** 12 - 1


def test_chi_with_frobenius_cycle(capsys):
    report, _ = call_json(capsys, "chi", "--type", "A1", "--f", "2")
    assert poly(report["chi"]) == T ** 4 - 1


def test_chi_star(capsys):
    report, _ = call_json(capsys, "chi-star", "--type", "GL3", "--q", "2")
    assert report["h"] == "3"
    assert report["chi_star_at_q"] == "21"


def test_banal(capsys):
    report, _ = call_json(capsys, "banal", "--type", "GL3", "--q", "2", "--e", "1")
    assert report["excluded_general"] == ["3", "7"]
    assert report["g_nonbanal"] == ["3", "7"]
    for key in ("chi", "chi_star", "h", "excluded_classical"):
        assert key in report


def test_compare_banal(capsys):
    report, _ = call_json(capsys, "compare-banal", "--type", "GL4", "--q", "2", "--bound", "50")
    rows = {r["ell"]: r for r in report["rows"]}
    assert rows["5"]["lg_excluded"] and rows["5"]["g_nonbanal"]
    assert not rows["11"]["lg_excluded"]
    assert report["all_agree"] is True


def test_count_points(capsys):
    report, _ = call_json(capsys, "count-points", "--group", "Sp4", "--ell", "2")
    assert report["formula"] == report["enumerated"] == "720"
    report, _ = call_json(capsys, "count-points", "--type", "GL3^2", "--q", "2")
    assert report["formula"] == "648"


def test_enumerate_round_trip(capsys):
    report, text = call_json(capsys, "enumerate", "--group", "GL2", "--ell", "3", "--k", "1", "--q", "2")
    assert report["count"] == "96" == str(len(report["points"]))
    spec = spec_from_json(report["spec"])
    sd = sd_from_json(report["sd"])
    for p in report["points"]:
        pt = point_from_json(p, spec, sd)
        assert relation_holds(pt.F0, pt.sigma0, sd)
        assert all(p["bounds"].values())
    # re-serialising the parsed report gives the same bytes
    assert emit_report(json.loads(text)) == text


def test_enumerate_is_deterministic(capsys):
    argv = ["enumerate", "--group", "GL2", "--ell", "5", "--q", "3", "--twist", "s"]
    _, first = call_json(capsys, *argv)
    _, second = call_json(capsys, *argv)
    _, parallel = call_json(capsys, *argv, "--workers", "3")
    assert first == second == parallel


def test_enumerate_csv(capsys):
    code, out, _ = call(capsys, "enumerate", "--group", "GL1", "--ell", "5", "--q", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == POINT_COLUMNS
    assert len(rows) == 9
    assert all(r[POINT_COLUMNS.index("unobstructed")] == "true" for r in rows[1:])


def test_non_point_csv(capsys):
    code, out, _ = call(capsys, "banal", "--type", "GL2", "--q", "3", "--format", "csv")
    assert code == 0
    rows = dict(list(csv.reader(io.StringIO(out)))[1:])
    assert rows["excluded_general"] == "2"


def test_empty_points_report():
    spec = GroupSpecFin("GL", 1, make_field(5))
    assert emit_report(points_report([], spec, SemidirectData.trivial(3))) == '{"points":[]}\n'


def test_tangent_single_point(capsys):
    report, _ = call_json(capsys, "tangent", "--group", "GL2", "--ell", "11", "--q", "3",
                          "--F0", "5,0;0,9", "--sigma0", "1,1;0,1")
    assert (report["dim"], report["h0"], report["unobstructed"]) == ("4", "0", True)


def test_tangent_histogram(capsys):
    report, _ = call_json(capsys, "tangent", "--group", "GL2", "--ell", "3", "--q", "2")
    assert report["equality_everywhere"] is True
    assert sum(int(h["count"]) for h in report["histogram"]) == 96


def test_torus_cocycles(capsys):
    report, _ = call_json(capsys, "torus-cocycles", "--afr", "1", "--as", "1", "--q", "3", "--ell", "7")
    assert report["free_rank"] == "1" and report["torsion"] == ["2"] and report["count"] == "12"
    report, _ = call_json(capsys, "torus-cocycles", "--afr", "0,1;1,0", "--as", "1,0;0,1", "--q", "3")
    assert report["torsion"] == ["8"]


def test_components(capsys):
    report, _ = call_json(capsys, "components", "--group", "GL1", "--ell", "5", "--q", "3")
    assert report["approximation"] is True
    assert sorted(c["count"] for c in report["classes"]) == ["4", "4"]


def test_kostant(capsys):
    report, _ = call_json(capsys, "kostant", "--type", "sl2", "--t", "2")
    assert report["det"] == "15"
    report, _ = call_json(capsys, "kostant", "--type", "sl3", "--twist", "outer", "--t", "2",
                          "--ell", "5", "--q", "2")
    assert abs(int(report["det"])) == 975
    assert report["regular_unipotent_unobstructed"] is True


def test_cohomology(capsys):
    report, _ = call_json(capsys, "cohomology", "--A", "4", "--fr", "3", "--q", "3", "--p", "5", "--brute")
    assert report["h1_inertia"] == ["4"]
    assert report["match"] is True


def test_out_file(tmp_path, capsys):
    target = tmp_path / "chi.json"
    code, out, _ = call(capsys, "chi", "--type", "GL2", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["h"] == "2"


# ---------------------------------------------------------------------------
# exit codes


@pytest.mark.parametrize("argv", [
    ["chi", "--type", "Q7"],
    ["chi"],
    ["frobnicate"],
    ["banal", "--type", "GL2", "--q", "6"],
    ["enumerate", "--group", "GL2", "--ell", "3", "--q", "3"],
    ["kostant", "--type", "sl3", "--twist", "sideways"],
    ["tangent", "--group", "GL2", "--ell", "11", "--q", "3", "--F0", "1,0;0,1", "--sigma0", "1,1;0,1"],
    ["torus-cocycles", "--afr", "1,0;0,1", "--as", "0,1;1,0", "--q", "2"],
])
def test_validation_errors_exit_1(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err.startswith("langparams: error:")
    assert err.count("\n") == 1


@pytest.mark.parametrize("argv", [
    ["enumerate", "--group", "GL2", "--ell", "5", "--q", "3", "--max-pairs", "100"],
    ["count-points", "--group", "GL4", "--ell", "3"],
    ["chi", "--type", "E7", "--method", "oracle"],
])
def test_size_guards_exit_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2
    assert err.startswith("langparams: refused:")


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "langparams.cli", "chi", "--type", "A1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["chi"]["text"] == "T^2 - 1"
    proc = subprocess.run([sys.executable, "-m", "langparams.cli", "chi", "--type", "nope"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1

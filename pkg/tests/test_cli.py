import csv
import io
import json
import math
import subprocess
import sys

import pytest

from finpart.cli import run, to_json


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke("--format", "json", *argv)
    return code, json.loads(out) if out else None, err


def test_fpi_both_methods():
    code, rep, _ = invoke_json("fpi", "--f", "one", "--n", "1", "--nu", "0.5", "--a", "1", "--method", "both")
    assert code == 0
    assert [r["method"] for r in rep["rows"]] == ["limit", "contour"]
    for r in rep["rows"]:
        assert r["value"] == pytest.approx(-2.0, abs=1e-10)
    assert rep["summary"]["bound_satisfied"] is True


def test_fpi_custom_contour_and_epsilon():
    code, rep, _ = invoke_json("--contour", "rect:1,0.5", "fpi", "--f", "exp_neg", "--n", "2", "--a", "1", "--method", "contour")
    assert code == 0
    _, lim, _ = invoke_json("fpi", "--f", "exp_neg", "--n", "2", "--a", "1", "--method", "limit")
    assert rep["rows"][0]["value"] == pytest.approx(lim["rows"][0]["value"], abs=1e-9)
    code, eps, _ = invoke_json("fpi", "--f", "exp_neg", "--n", "1", "--a", "1", "--method", "epsilon")
    assert code == 0 and eps["rows"][0]["method"] == "epsilon"


def test_stieltjes_total():
    code, rep, _ = invoke_json("stieltjes", "--f", "one", "--nu", "0", "--omega", "0.5", "--a", "2", "--terms", "30")
    assert code == 0
    assert len(rep["rows"]) == 30
    assert rep["rows"][-1]["total"] == pytest.approx(math.log(5), abs=1e-12)


def test_stieltjes_csv_columns():
    code, out, _ = invoke("stieltjes", "--f", "exp_neg", "--nu", "0.5", "--omega", "0.5", "--a", "10", "--terms", "30", "--report", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "S_n", "correction", "total", "bound", "direct", "abs_err"]
    assert len(rows) == 31
    last = dict(zip(rows[0], rows[-1]))
    assert float(last["abs_err"]) <= float(last["bound"]) + 1e-11


def test_missing_terms_demo():
    code, rep, _ = invoke_json("demo", "missing-terms", "--nu", "0.3333333333", "--omega", "10")
    assert code == 0
    last = rep["rows"][-1]
    assert last["corrected"] == pytest.approx(1.5842, abs=1e-4)
    assert last["naive"] == pytest.approx(1.7439, abs=1e-4)
    assert list(last) == ["N", "naive", "corrected", "direct", "naive_err", "corrected_err"]


@pytest.mark.parametrize("demo", ["e1", "igamma", "pole-exclusion"])
def test_other_demos_pass(demo):
    code, rep, _ = invoke_json("demo", demo)
    assert code == 0
    assert rep["rows"]


def test_expand_infinity():
    code, rep, _ = invoke_json("expand-infinity", "--nu", "0.5", "--omega", "100", "--terms", "8")
    assert code == 0
    assert rep["rows"][-1]["abs_err"] < 1e-6
    code, naive, _ = invoke_json("expand-infinity", "--nu", "0.3333333333333333", "--omega", "10", "--naive")
    assert naive["rows"][-1]["abs_err"] == pytest.approx(0.1597, abs=1e-3)


@pytest.mark.parametrize(
    "argv",
    [
        ["stieltjes", "--f", "one", "--omega", "3", "--a", "1"],
        ["fpi", "--f", "sin", "--n", "1", "--a", "1"],
        ["fpi", "--f", "one", "--n", "1", "--a", "1", "--bogus"],
        ["fpi", "--f", "one", "--n", "0", "--a", "1"],
        ["expand-infinity", "--nu", "0.5", "--omega", "0.5"],
        ["fpi", "--f", "geom(2)", "--n", "2", "--a", "3", "--contour", "circle:3", "--method", "contour"],
        ["demo"],
        [],
    ],
)
def test_usage_and_domain_errors(argv):
    code, out, err = invoke(*argv)
    assert code == 1
    assert out == ""
    assert err.count("\n") == 1 and err.startswith("finpart: error:")


def test_failed_bound_exit_code():
    # three terms of the E1 series cannot reach 1e-9 at omega = 2
    code, rep, _ = invoke_json("demo", "e1", "--omega", "2", "--terms", "3")
    assert code == 2
    assert rep["summary"]["bound_satisfied"] is False


def test_json_round_trip():
    code, out, _ = invoke("--format", "json", "demo", "pole-exclusion")
    rep = json.loads(out)
    assert to_json(rep) == out.strip()


def test_text_format():
    code, out, _ = invoke("demo", "e1", "--omega", "1")
    assert out.startswith("# demo e1")
    assert "0.2193839344" in out


def test_deterministic_bytes():
    argv = [sys.executable, "-m", "finpart", "--format", "json", "stieltjes", "--f", "geom(2)", "--omega", "0.5", "--a", "1", "--terms", "10"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


def test_non_finite_serialised_as_null():
    assert to_json({"x": math.inf, "y": [1.0, math.nan]}) == '{"x": null, "y": [1, null]}'

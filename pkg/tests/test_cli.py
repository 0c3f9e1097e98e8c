import io
import json
import math

import pytest

from opmonoid import cli
from opmonoid.errors import SingularGram
from opmonoid.series import norm_sq, parse_series


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), stdout=out)
    return code, out.getvalue()


def csv_rows(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_gram_json():
    code, out = run("gram", "--monoid", "noor", "--vector", "1,1", "--sigma", "1,-1", "--N", "3")
    assert code == 0
    d = json.loads(out)
    assert d["indices"] == [1, 2, 3]
    assert len(d["gram"]) == 3 and len(d["rhs"]) == 3


def test_approx_json():
    code, out = run("approx", "--monoid", "noor", "--vector", "1,1", "--sigma", "1,-1", "--N", "4")
    assert code == 0
    d = json.loads(out)
    assert set(d) >= {"indices", "coefficients", "dist_sq", "condition_estimate", "solver_used"}
    assert d["dist_sq"] == pytest.approx(2.0, abs=1e-10)


def test_cyclic_trace_generic_target():
    code, out = run("cyclic-trace", "--monoid", "noor", "--vector", "1,1", "--sigma", "1,-1", "--N", "8")
    assert code == 0
    assert out.splitlines()[0] == "N,dist_sq,c_n0_re,c_n0_im,cond,trunc,trunc_err"
    rows = csv_rows(out)
    assert [int(r["N"]) for r in rows] == list(range(1, 9))
    assert all(abs(float(r["dist_sq"]) - 2) <= 1e-10 for r in rows)


def test_cyclic_trace_aleph_target():
    code, out = run("cyclic-trace", "--monoid", "dilation", "--vector", "0,1", "--N", "5")
    assert code == 0
    assert all(float(r["dist_sq"]) <= 1e-12 for r in csv_rows(out))


def test_inner_check_and_failure_report():
    code, out = run("inner-check", "--monoid", "dilation", "--vector", "0,0,1,1", "--K", "50")
    assert code == 0 and json.loads(out)["passed"]
    code, out = run("inner-check", "--monoid", "scalar:0.7,0", "--vector", "1", "--K", "10")
    d = json.loads(out)
    assert code == 0 and not d["passed"]
    assert d["violating_index"] == 1
    assert d["max_violation"] == pytest.approx(0.7)


def test_inner_project_emits_parseable_series():
    code, out = run("inner-project", "--monoid", "noor", "--vector", "1", "--K", "6")
    assert code == 0
    d = json.loads(out)
    s = parse_series(d["series"])
    assert s.allclose(parse_series("0.5,-0.5"), atol=1e-10)
    assert d["inner_report"]["passed"]


def test_stabilize_examples():
    code, out = run("stabilize", "--monoid", "dilation", "--vector", "0,0,1,1", "--N", "16")
    assert code == 0 and json.loads(out)["result"] == "pass"
    code, out = run("stabilize", "--monoid", "noor", "--vector", "1", "--N", "6")
    d = json.loads(out)
    assert d["result"] == "fail"


def test_stabilize_without_aleph_is_validation_error():
    code, _ = run("stabilize", "--monoid", "scalar:0.7,0", "--vector", "1")
    assert code == 1


@pytest.mark.parametrize("probe", ["aleph", "random", "1,2i"])
def test_verify_monoid(probe):
    code, out = run("verify-monoid", "--monoid", "noor", "--max-index", "6", "--probe", probe)
    assert code == 0
    d = json.loads(out)
    assert d["result"] == "pass"
    parse_series(d["probe"])


def test_noor_hk_csv():
    code, out = run("noor-hk", "--k", "2", "--trunc", "3")
    assert code == 0
    rows = csv_rows(out)
    assert [int(r["n"]) for r in rows] == [0, 1, 2, 3]
    assert float(rows[0]["c_n"]) == -math.log(2)


def test_rh_trace_output():
    code, out = run("rh-trace", "--combo", "2:1.0", "--trunc", "256", "--N", "6")
    assert code == 0
    first, rest = out.split("\n", 1)
    header = json.loads(first)
    assert header["D"] == 256
    assert header["target_re"] == pytest.approx(-math.sqrt(2), abs=1e-12)
    assert len(csv_rows(rest)) == 6


def test_flambda_dichotomy():
    code, out = run("flambda", "--d", "1", "--lambdas", "0.5,1,2", "--N", "16")
    assert code == 0
    by_lam = {}
    for r in csv_rows(out):
        by_lam.setdefault(float(r["lambda"]), []).append(float(r["dist_sq"]))
    assert by_lam[2.0][-1] < 0.5 * by_lam[2.0][0]
    assert by_lam[1.0][-1] < 0.5 * by_lam[1.0][0]
    assert min(by_lam[0.5]) >= 0.75 - 1e-12
    assert by_lam[0.5][-1] == pytest.approx(1024 / 1365, abs=1e-10)


@pytest.mark.parametrize(
    "argv",
    [
        ["gram", "--monoid", "bogus", "--vector", "1"],
        ["gram", "--vector", "1,,2"],
        ["approx", "--monoid", "noor", "--vector", "0", "--sigma", "1"],
        ["approx", "--monoid", "dilation", "--vector", "1,1", "--sigma", "0,1"],
        ["noor-hk", "--k", "1"],
        ["rh-trace", "--combo", "2:1,3:-1", "--trunc", "64", "--N", "4"],
        ["inner-check", "--vector", "1", "--K", "-3"],
        ["inner-check", "--vector", "1", "--K", "x"],
        ["gram", "--vector", "1", "--format", "csv"],
        ["nosuch"],
        ["gram", "--vector", "1", "--unknown", "3"],
    ],
)
def test_validation_errors_exit_1(argv):
    code, out = run(*argv)
    assert code == 1
    assert out == ""


def test_solver_error_exits_2(monkeypatch):
    def boom(*_a, **_k):
        raise SingularGram("forced")

    monkeypatch.setattr(cli.approx, "solve_system", boom)
    code, _ = run("approx", "--monoid", "noor", "--vector", "1,1", "--sigma", "1", "--N", "2")
    assert code == 2


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "opts.cfg"
    cfg.write_text("# comment\nmonoid = dilation\nvector = 0,0,1,1\nK = 12\n")
    code, out = run("inner-check", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["max_index_checked"] == 12
    code, out = run("inner-check", "--config", str(cfg), "--K", "30")
    assert json.loads(out)["max_index_checked"] == 30
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert run("inner-check", "--config", str(bad), "--vector", "1")[0] == 1
    assert run("inner-check", "--config", str(tmp_path / "missing.cfg"))[0] == 1


def test_output_file_and_vector_file(tmp_path):
    vec = tmp_path / "h.txt"
    vec.write_text("0,0,1,1\n")
    dest = tmp_path / "out.json"
    code, out = run("inner-check", "--monoid", "dilation", "--vector", f"@{vec}", "--output", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["passed"]


def test_series_literals_round_trip_through_approx():
    code, out = run("approx", "--monoid", "shift", "--vector", "1,-0.5", "--sigma", "1,0.25i,3", "--N", "3")
    d = json.loads(out)
    assert code == 0
    assert 0 <= d["dist_sq"] <= norm_sq(parse_series("1,0.25i,3"))


@pytest.mark.parametrize(
    "argv",
    [
        ["cyclic-trace", "--monoid", "noor", "--vector", "1,1", "--sigma", "1,-1", "--N", "12"],
        ["flambda", "--d", "1", "--lambdas", "0.5,2", "--N", "16"],
        ["rh-trace", "--combo", "2:1.0", "--trunc", "512", "--N", "8"],
    ],
)
def test_repeat_runs_identical(argv):
    assert run(*argv) == run(*argv)

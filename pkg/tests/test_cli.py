import io
import json
from fractions import Fraction

import pytest

from robxp import random_bnn
from robxp.cli import main
from robxp.fixtures import constant_lookup, kappa1_threshold
from robxp.modelio import save_model


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--format", "json", "--deterministic")
    return code, json.loads(out) if out else None, err


def test_robust_exit_0():
    code, data, _ = run_json("robust", "--model", "builtin:kappa1", "--point", "0.7", "--eps", "0.005")
    assert code == 0
    assert data["verdict"] == "Robust"
    assert data["cross_check"]["agrees"]


def test_not_robust_exit_10():
    code, data, _ = run_json("robust", "--model", "builtin:kappa1", "--point", "0.7", "--eps", "0.1")
    assert code == 10
    assert Fraction(data["witness"][0]) < kappa1_threshold()


def test_missing_model_exit_2(tmp_path):
    code, _, err = run("robust", "--model", str(tmp_path / "none.json"), "--point", "0.7", "--eps", "0.1")
    assert code == 2
    assert "none.json" in err


@pytest.mark.parametrize("argv", [
    ["robust", "--model", "builtin:kappa1", "--point", "0.7"],
    ["robust", "--model", "builtin:kappa1", "--point", "0.7", "--eps", "-1"],
    ["robust", "--model", "builtin:kappa9", "--point", "0.7", "--eps", "1"],
    ["robust", "--model", "builtin:kappa1", "--point", "0.7,1", "--eps", "1"],
    ["robust", "--model", "builtin:kappa1", "--point", "0.7", "--eps", "1", "--solver", "magic"],
    ["nonsense"],
])
def test_config_errors(argv):
    assert run(*argv)[0] == 2


def test_unknown_exit_20(tmp_path):
    path = tmp_path / "m.json"
    save_model(random_bnn(5), path)
    code, data, _ = run_json("robust", "--model", str(path), "--point", ",".join(["0"] * random_bnn(5).m),
                             "--norm", "l0", "--eps", "40", "--limit-conflicts", "0")
    assert code in (10, 20)
    if code == 20:
        assert data["verdict"] == "Unknown"


def test_dataset_row(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("x1,y\n0.3,0\n0.7,1\n")
    code, data, _ = run_json("robust", "--model", "builtin:kappa1", "--dataset", str(path), "--row", "1",
                             "--eps", "0.006")
    assert code == 10
    assert data["point"] == ["0.7"]


def test_global_kappa1_straddles():
    for eps in ("0.0001", "0.5"):
        code, data, _ = run_json("global", "--model", "builtin:kappa1", "--eps", eps)
        assert code == 0 and data["AEx"] == "Yes"
        lo, hi = sorted([Fraction(data["v"][0]), Fraction(data["x"][0])])
        assert lo < kappa1_threshold() <= hi


def test_global_bnn_row(tmp_path):
    path = tmp_path / "b.json"
    save_model(random_bnn(0, n_inputs=8, levels=2), path)
    code, data, _ = run_json("global", "--model", str(path), "--norm", "l0", "--eps", "1")
    assert code == 0 and data["AEx"] == "Yes"
    assert sum(a != b for a, b in zip(data["v"], data["x"])) == 1


def test_global_constant_exit_3(tmp_path):
    path = tmp_path / "c.json"
    save_model(constant_lookup(), path)
    assert run("global", "--model", str(path), "--norm", "l0", "--eps", "1")[0] == 3


def test_explain_axp():
    code, data, _ = run_json("explain", "axp", "--model", "builtin:kappa2", "--point", "0,1", "--eps", "0.7")
    assert code == 0
    assert data["explanations"][0]["features"] == [1]


def test_explain_enumerate():
    code, data, _ = run_json("explain", "enumerate", "--model", "builtin:kappa2", "--point", "0,1", "--eps", "0.5")
    assert data["complete"] is True
    assert [(e["kind"], e["features"]) for e in data["explanations"]] == [("AXp", [])]


def test_explain_limit():
    code, data, _ = run_json("explain", "enumerate", "--model", "builtin:kappa2", "--point", "0,1",
                             "--eps", "0.7", "--limit", "1")
    assert len(data["explanations"]) == 1
    assert data["complete"] is False


def test_demo_numbers():
    code, data, _ = run_json("demo")
    assert code == 0
    assert abs(float(Fraction(data["transition_point"])) - 0.69459459) <= 1e-6
    assert abs(float(Fraction(data["flip_threshold"])) - 0.00540541) <= 1e-6
    assert [data["local"][e]["verdict"] for e in ("0.1", "0.006", "0.005")] == ["NotRobust", "NotRobust", "Robust"]
    assert all(r["sampled"] == "NoAExFound" and r["complete"] == "Robust" for r in data["certify"]["rows"])
    assert data["certify"]["counterexample"] is not None


def test_demo_human_output():
    code, out, _ = run("demo", "--deterministic")
    assert "0.69459459" in out and "0.00540541" in out


def test_bench(tmp_path):
    assert run("gen-bnn", str(tmp_path), "--count", "5")[0] == 0
    (tmp_path / "zz_broken.json").write_text("{\"format\": ")
    code, out, _ = run("bench", str(tmp_path), "--format", "csv", "--deterministic")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "model,m,K,D,#N,p,eps,AEx,note"
    rows = lines[1:]
    assert len(rows) == 11
    assert sum(",Yes," in r for r in rows) == 10
    assert "zz_broken.json" in rows[-1] and ",error," in rows[-1]


def test_bench_empty_dir(tmp_path):
    code, out, _ = run("bench", str(tmp_path), "--format", "csv")
    assert code == 0
    assert out.strip().splitlines() == ["model,m,K,D,#N,p,eps,AEx,time,note"]


def test_fixture_round_trip(tmp_path):
    path = tmp_path / "k2.json"
    assert run("fixture", "kappa2", "--out", str(path))[0] == 0
    code, data, _ = run_json("robust", "--model", str(path), "--point", "0,1", "--eps", "0.5")
    assert code == 0


def test_external_solver_flag(self_solver):
    code, data, _ = run_json("global", "--model", "builtin:kappa1", "--quantize-model", "--qs", "0.001",
                             "--eps", "0.001", "--solver", f"cmd:{self_solver}")
    assert code == 0 and data["AEx"] == "Yes"


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    run("robust", "--model", "builtin:kappa1", "--point", "0.7", "--eps", "0.1", "--format", "json", "--out",
        str(target))
    assert json.loads(target.read_text())["verdict"] == "NotRobust"

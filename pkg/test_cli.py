"""Command-line surface and exit codes, driven through main(argv)."""
import json
import logging

import pytest

from flatdeform.main import main
from flatdeform.utils.problem import load_problem


@pytest.fixture
def toy(fixtures_dir):
    return str(fixtures_dir / "toy_m2.json")


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_analyze_writes_report_and_table(toy, tmp_path, caplog):
    caplog.set_level(logging.INFO)
    out, table = tmp_path / "report.json", tmp_path / "table.json"
    assert main(["analyze", toy, "--out", str(out), "--table", str(table)]) == 0
    report = json.loads(out.read_text())
    assert report["n"] == 4
    assert [b["q"] for b in report["basis"]] == ["1", "x", "y", "y*x"]
    assert report["associative"] is True
    assert json.loads(table.read_text())["digest"] == report["table_digest"]
    assert "Step 2: Extracting image basis..." in caplog.text


def test_fiber_csv(toy, tmp_path):
    csv_path = tmp_path / "zeta.csv"
    assert main(["fiber", toy, "--csv", str(csv_path), "--quiet"]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "i,k,m,zeta"
    # x*y = y - yx in the fiber
    assert "2,1,2,1" in lines and "3,1,2,-1" in lines


def test_verify_problem_and_table(toy, tmp_path):
    assert main(["verify", toy, "--quiet"]) == 0
    table = tmp_path / "table.json"
    assert main(["analyze", toy, "--table", str(table), "--quiet"]) == 0
    assert main(["verify", str(table), "--quiet"]) == 0


def test_verify_rejects_a_corrupted_table(toy, tmp_path):
    table = tmp_path / "table.json"
    assert main(["analyze", toy, "--table", str(table), "--quiet"]) == 0
    data = json.loads(table.read_text())
    for entry in data["entries"]:
        if (entry["i"], entry["k"], entry["m"]) == (0, 2, 2):
            entry["num"] = ["2"]
    assert main(["verify", write_json(table, data), "--quiet"]) == 1


def test_specialize_and_polytype(toy, tmp_path):
    out = tmp_path / "special.json"
    assert main(["specialize", toy, "--at", "1/2", "--out", str(out), "--quiet"]) == 0
    report = json.loads(out.read_text())
    assert report["specialization"]["1/2"]["shape"] == [2]
    assert report["generation_dimension"] == 4
    polytype = tmp_path / "polytype.json"
    assert main(["polytype", toy, "--out", str(polytype), "--quiet"]) == 0
    assert json.loads(polytype.read_text())["h"] == ["1"]


def test_present(toy, tmp_path):
    good = write_json(tmp_path / "good.json",
                      {"relations": ["x^2 - x", "y^2", "x*y + y*x - y"], "bound": 10})
    out = tmp_path / "present.json"
    assert main(["present", toy, "--relations", good, "--out", str(out), "--quiet"]) == 0
    assert json.loads(out.read_text())["presentation"]["verdict"] == "isomorphic"
    bad = write_json(tmp_path / "bad.json", {"relations": ["x - y"], "bound": 10})
    assert main(["present", toy, "--relations", bad, "--quiet"]) == 1


def test_flatcert_and_scenario(toy, tmp_path):
    out = tmp_path / "cert.json"
    assert main(["flatcert", toy, "--out", str(out), "--quiet"]) == 0
    assert json.loads(out.read_text())["certificate"]["s_max"] == "1"
    scenario = tmp_path / "scenario.json"
    assert main(["toy-m2", "--out", str(scenario), "--quiet"]) == 0
    report = json.loads(scenario.read_text())
    assert report["fiber"]["radical_dim"] == 2
    assert report["certificate"]["reports"]["1"]["shape"] == [2]


def test_emit_writes_a_loadable_problem(tmp_path):
    path = tmp_path / "a8.json"
    assert main(["a8", "--params", "1,1,1,2,2", "--emit", str(path), "--quiet"]) == 0
    problem = json.loads(path.read_text())
    assert problem["name"] == "a8 (1,1,1,2,2)"
    assert load_problem(path).options.expected_dim == 8


def test_input_errors_exit_with_two(tmp_path):
    assert main(["analyze", str(tmp_path / "missing.json"), "--quiet"]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert main(["analyze", str(broken), "--quiet"]) == 2
    assert main(["a8", "--params", "1,1,2,2,3", "--quiet"]) == 2
    with pytest.raises(SystemExit):
        main(["specialize", "whatever.json", "--at", "half"])


def test_word_budget_exit_code(toy):
    assert main(["analyze", toy, "--word-budget", "2", "--quiet"]) == 3

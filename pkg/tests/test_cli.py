import json

import pytest

from arithvol.cli import (
    EXIT_AUDIT,
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_OK,
    main,
)


def run(tmp_path, *argv, sub="out"):
    out = tmp_path / sub
    return main(list(argv) + ["--out", str(out)]), out


def test_measure_weighted_p1(tmp_path):
    code, out = run(
        tmp_path, "measure", "--kind", "weighted_p1", "--param", "lam=1",
        "--degrees", "20", "--no-timestamp",
    )
    assert code == EXIT_OK
    data = json.loads((out / "measure.json").read_text())
    assert len(data["atoms"]) == 21
    csv = (out / "measure.csv").read_text()
    assert csv.splitlines()[0] == "x,w,cdf"


def test_measure_random_flag(tmp_path):
    code, out = run(
        tmp_path, "measure", "--kind", "random_flag", "--param", "dim=4",
        "--seed", "5", "--no-timestamp",
    )
    assert code == EXIT_OK
    data = json.loads((out / "measure.json").read_text())
    assert sum(eval(a["w"].replace("/", "/1.0/")) or True for a in data["atoms"])


def test_outputs_byte_identical_with_fixed_seed(tmp_path):
    argv = [
        "lattice-audit", "--kind", "random_lattice", "--param", "rank=2",
        "--param", "bound=3", "--seed", "11", "--count", "3", "--no-timestamp",
    ]
    code1, out1 = run(tmp_path, *argv, sub="a")
    code2, out2 = run(tmp_path, *argv, sub="b")
    assert code1 == code2 == EXIT_OK
    assert (out1 / "lattice_audit.json").read_bytes() == (
        out2 / "lattice_audit.json"
    ).read_bytes()


def test_timestamp_line_prepended(tmp_path):
    code, out = run(
        tmp_path, "measure", "--kind", "constant_twist", "--param", "lam=1",
        "--degrees", "5",
    )
    assert code == EXIT_OK
    first = (out / "measure.json").read_text().splitlines()[0]
    assert "generated_at" in first
    first_csv = (out / "measure.csv").read_text().splitlines()[0]
    assert first_csv.startswith("# generated_at")


def test_trace_exit_ok(tmp_path):
    code, out = run(
        tmp_path, "trace", "--kind", "weighted_p1", "--param", "lam=1",
        "--degrees", "50,100", "--no-timestamp",
    )
    assert code == EXIT_OK
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0].startswith("n,rank,h0")
    assert len(lines) == 3


def test_fujita_exit_ok(tmp_path):
    code, out = run(
        tmp_path, "fujita", "--kind", "two_sided", "--param", "a=1",
        "--param", "b=-1", "--degrees", "60", "--p", "2,4", "--no-timestamp",
    )
    assert code == EXIT_OK
    data = json.loads((out / "fujita.json").read_text())
    assert {r["p"] for r in data["rows"]} == {2, 4}


def test_truncation_exit_ok(tmp_path):
    code, out = run(
        tmp_path, "truncation", "--kind", "two_sided", "--degrees", "60",
        "--p", "2", "--xs=-1/2,0,1/2", "--no-timestamp",
    )
    assert code == EXIT_OK
    data = json.loads((out / "truncation.json").read_text())
    assert "effective" in data and "generated-p2" in data


def test_metric_compare_exit_ok(tmp_path):
    code, out = run(
        tmp_path, "metric-compare", "--kind", "weighted_p1",
        "--degrees", "10,20", "--count", "4", "--seed", "3", "--no-timestamp",
    )
    assert code == EXIT_OK
    data = json.loads((out / "metric_compare.json").read_text())
    assert len(data) == 4
    assert all(e["verdict"] == "pass" for e in data)


def test_bad_kind_is_config_error(tmp_path):
    code, _ = run(tmp_path, "measure", "--kind", "nonsense")
    assert code == EXIT_CONFIG


def test_bad_param_is_config_error(tmp_path):
    code, _ = run(
        tmp_path, "measure", "--kind", "weighted_p1", "--param", "lam"
    )
    assert code == EXIT_CONFIG


def test_missing_kind_is_config_error(tmp_path):
    code, _ = run(tmp_path, "measure")
    assert code == EXIT_CONFIG


def test_missing_config_file_is_config_error(tmp_path):
    code, _ = run(
        tmp_path, "measure", "--config", str(tmp_path / "nope.json")
    )
    assert code == EXIT_CONFIG


def test_config_file_loading(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"model": {"kind": "weighted_p1", "params": {"lam": 1}}})
    )
    code, out = run(
        tmp_path, "measure", "--config", str(cfg), "--degrees", "10",
        "--no-timestamp",
    )
    assert code == EXIT_OK
    data = json.loads((out / "measure.json").read_text())
    assert len(data["atoms"]) == 11


def test_tiny_budget_is_budget_exit(tmp_path):
    code, _ = run(
        tmp_path, "lattice-audit", "--kind", "random_lattice",
        "--param", "rank=4", "--param", "bound=5", "--seed", "1",
        "--budget-nodes", "20", "--no-timestamp",
    )
    assert code == EXIT_BUDGET

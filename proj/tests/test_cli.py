"""Exit codes, output formats and determinism of the nsp-lab binary."""

import csv
import io
import json
import os
import subprocess

import pytest

NSP_LAB = os.environ.get("NSP_LAB", "nsp-lab")


def run(*args, check_rc=0):
    p = subprocess.run([NSP_LAB, *args], capture_output=True, text=True)
    assert p.returncode == check_rc, p.stderr
    return p.stdout


def rows(text):
    return list(csv.DictReader(io.StringIO(text), restkey="extra")) if not text.startswith("#") else list(
        csv.DictReader(io.StringIO("\n".join(l for l in text.splitlines() if not l.startswith("#"))))
    )


def test_usage_errors_exit_2():
    run("suite", "bogus", check_rc=2)
    run("tradeoff", "--beta", "100", "--gamma", "100", check_rc=2)
    run("nsc", "--measure", "l7", check_rc=2)
    run("nsc", "--matrix", "/nonexistent.csv", check_rc=2)
    run("mc", "--m", "9", check_rc=2)
    run("plot", "--kind", "boundary_map", "--grid", "0x0", check_rc=2)
    run(check_rc=2)


def test_csv_format(tmp_path):
    out = tmp_path / "t.csv"
    run("tradeoff", "--beta", "100", "--gamma-sweep", "62:100:1", "--out", str(out))
    data = out.read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert lines[0].startswith("# nsp-lab tradeoff seed=1 config_hash=")
    assert lines[1] == "gamma,delta,C,oracle_C,gordon_bound"
    table = rows(data.decode())
    assert len(table) == 38
    assert float(table[-1]["gamma"]) == 99
    cs = [float(r["C"]) for r in table]
    gs = [float(r["gamma"]) for r in table]
    # C has a single minimum near gamma = 78.37 on this sweep.
    assert all(b < a for g, a, b in zip(gs[1:], cs, cs[1:]) if g <= 78)
    assert all(b > a for g, a, b in zip(gs, cs, cs[1:]) if g >= 79)
    # 17 significant digits.
    assert table[0]["delta"] == "0.0060181375046308716"


def test_nsc_exact_values():
    for gen, theta in [("1,1,1", 0.5), ("1,2,4", 4 / 3)]:
        r = rows(run("nsc", "--generator", gen, "--k", "1"))[0]
        assert float(r["theta"]) == pytest.approx(theta, abs=1e-12)
        assert r["method"] == "exact_1d"


def test_json_and_determinism():
    a = run("mc", "--trials", "60", "--d", "0.001,0.1", "--format", "json", "--seed", "4")
    b = run("--threads", "3", "--seed", "4", "--format", "json", "mc", "--trials", "60", "--d", "0.001,0.1")
    assert a == b
    doc = json.loads(a)
    assert doc["result"]["subset_violations"] == 0
    assert doc["config_hash"] == doc["result"]["config_hash"]
    assert run("mc", "--trials", "60", "--seed", "5") != run("mc", "--trials", "60", "--seed", "4")


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("trials = 30\nd_grid = 0.01\nseed = 3\n")
    base = run("--config", str(cfg), "mc")
    assert rows(base)[0]["trials"] == "30"
    over = run("--config", str(cfg), "mc", "--trials", "40")
    assert rows(over)[0]["trials"] == "40"
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    run("--config", str(bad), "mc", check_rc=2)


def test_ce1_and_probe():
    table = rows(run("ce1"))
    assert [r["found"] for r in table] == ["true"] * 4
    assert all(float(r["deficit"]) > 1e-12 for r in table)
    p = rows(run("probe", "--generator", "1,1,2", "--measure", "exp_ce1", "--d", "0.01"))[0]
    assert p["outcome"] == "violated"


def test_boundary_and_recover(tmp_path):
    table = rows(run("boundary", "--grid", "5x5"))
    for r in table:
        expect = "A" if float(r["a"]) >= 1 or float(r["b"]) >= 1 else "B"
        assert r["region"] == expect
    A = tmp_path / "A.csv"
    A.write_text("1,0,0,1\n0,1,0,1\n0,0,1,1\n")
    y = tmp_path / "y.csv"
    y.write_text("0\n0\n2\n")
    r = json.loads(run("recover", "--matrix", str(A), "--y", str(y), "--method", "enumerate", "--format", "json"))
    assert r["result"]["solution"]["x_hat"] == pytest.approx([0, 0, 2, 0], abs=1e-12)
    batch = rows(run("recover", "--matrix", str(A), "--trials", "3", "--k", "1", "--eps", "0.01"))
    assert len(batch) == 3


def test_width_and_plot():
    r = rows(run("width", "--n", "4", "--k", "4", "--draws", "2000"))[0]
    assert float(r["mean"]) == pytest.approx(float(r["chi_mean"]), rel=0.05)
    out = run("plot", "--kind", "tradeoff_curve")
    assert out.startswith("# nsp-lab tradeoff_curve seed=1 config_hash=")


def test_suite_mutation_fails(tmp_path):
    out = tmp_path / "b.json"
    p = subprocess.run([NSP_LAB, "suite", "quick", "--corrupt-mcp", "--out", str(out)], capture_output=True, text=True)
    assert p.returncode == 1
    bundle = json.loads(out.read_text())
    assert bundle["passed"] is False
    failed = [c["id"] for c in bundle["criteria"] if not c["passed"]]
    assert failed == [12]

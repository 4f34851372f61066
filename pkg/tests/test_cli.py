import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from treedegree.cli import execute, run
from treedegree.io import dumps, load_schema

DATA = Path(__file__).parent / "data"
GOLDEN = {
    "expectation_k4": ("expectation", "--graph", "k4.json", "--node", "0"),
    "edge_prob_path3": ("edge-prob", "--graph", "path3.txt", "--edge", "0,1"),
    "check_wtri": ("check", "--graph", "wtri.json", "--node", "0"),
}
SCHEMA = load_schema("result")


def cli(*argv):
    argv = [str(DATA / a) if (DATA / a).is_file() else a for a in argv]
    code, doc = execute(argv)
    if doc is not None:
        jsonschema.validate(doc, SCHEMA)
    return code, doc


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden(name):
    # residuals and condition estimates depend on the BLAS build, so the
    # pinned text covers everything except those diagnostics
    code, doc = cli(*GOLDEN[name])
    assert code == 0
    pinned = {k: doc[k] for k in ("command", "input_digest", "root", "values")}
    if "oracle" in doc["diagnostics"]:
        pinned["oracle"] = doc["diagnostics"]["oracle"]
    assert dumps(pinned, indent=2) + "\n" == (DATA / f"golden_{name}.json").read_text()


@pytest.mark.parametrize("command", [
    ("expectation", "--node", "0"),
    ("variance", "--node", "1"),
    ("covariance", "--nodes", "0,2"),
    ("edge-prob", "--all"),
    ("distribution", "--node", "0"),
    ("decomposable", "--variance"),
    ("tree-weight",),
    ("sample", "--count", "300", "--seed", "9", "--moments", "0,1"),
    ("enumerate", "--report"),
    ("check",),
])
def test_text_and_json_inputs_identical(command):
    a = cli(command[0], "--graph", "wtri.json", *command[1:])[1]
    b = cli(command[0], "--graph", "wtri.txt", *command[1:])[1]
    assert dumps(a["values"]) == dumps(b["values"])
    assert a["input_digest"] == b["input_digest"]


def test_hand_values():
    assert cli("expectation", "--graph", "k4.json", "--node", "0")[1]["values"]["expectation"] == 1.5
    assert cli("edge-prob", "--graph", "path3.txt", "--edge", "0,1")[1]["values"]["probability"] == 1.0
    code, doc = cli("check", "--graph", "wtri.json", "--node", "0")
    assert code == 0 and doc["values"]["passed"]
    assert math.isclose(doc["diagnostics"]["oracle"]["nodes"][0]["expectation"], 14 / 11, rel_tol=1e-15)


def test_every_command_validates():
    k4 = "k4.json"
    runs = [
        ("variance", "--graph", k4, "--node", "1"),
        ("covariance", "--graph", k4, "--nodes", "0,1"),
        ("edge-prob", "--graph", k4, "--all"),
        ("distribution", "--graph", k4, "--node", "0"),
        ("distribution", "--graph", k4, "--node", "0", "--joint", "1", "--mode", "exact"),
        ("decomposable", "--graph", k4, "--variance"),
        ("tree-weight", "--graph", k4),
        ("tree-weight", "--graph", k4, "--log"),
        ("sample", "--graph", k4, "--count", "100", "--seed", "1", "--moments", "0,1"),
        ("enumerate", "--graph", k4, "--report"),
        ("check", "--graph", k4),
        ("expectation", "--graph", "digraph.json", "--node", "1", "--root", "2"),
        ("check", "--graph", "digraph.json", "--root", "2"),
    ]
    for argv in runs:
        code, doc = cli(*argv)
        assert code == 0, argv
        assert doc["command"] == argv[0]


def test_values():
    assert cli("variance", "--graph", "k4.json", "--node", "1")[1]["values"]["variance"] == pytest.approx(0.375)
    assert cli("covariance", "--graph", "k4.json", "--nodes", "0,1")[1]["values"]["covariance"] == pytest.approx(-0.125)
    doc = cli("edge-prob", "--graph", "k4.json", "--all")[1]
    assert doc["values"]["sum"] == pytest.approx(3.0)
    dist = cli("distribution", "--graph", "k4.json", "--node", "0")[1]["values"]["distribution"]
    assert [d["degree"] for d in dist] == [1, 2, 3]
    assert [d["probability"] for d in dist] == pytest.approx([9 / 16, 6 / 16, 1 / 16], abs=1e-12)
    assert cli("tree-weight", "--graph", "k4.json")[1]["values"]["tree_weight"] == pytest.approx(16.0)
    doc = cli("enumerate", "--graph", "k4.json")[1]
    assert doc["values"]["tree_count"] == 16
    assert cli("expectation", "--graph", "digraph.json", "--node", "1", "--root", "2")[1]["values"]["expectation"] == 1.5


def test_sample_is_reproducible():
    a = cli("sample", "--graph", "k4.json", "--count", "500", "--seed", "4", "--threads", "1")[1]
    b = cli("sample", "--graph", "k4.json", "--count", "500", "--seed", "4", "--threads", "2")[1]
    assert a["values"] == b["values"]


@pytest.mark.parametrize("argv, code", [
    (("expectation", "--graph", "k4.json", "--node", "9"), 2),
    (("expectation", "--graph", "k4.json"), 2),
    (("frobnicate", "--graph", "k4.json"), 2),
    (("expectation", "--graph", "missing.json", "--node", "0"), 2),
    (("covariance", "--graph", "k4.json", "--nodes", "1,1"), 2),
    (("edge-prob", "--graph", "path3.txt", "--edge", "0,2"), 2),
    (("expectation", "--graph", "digraph.json", "--node", "1"), 2),
    (("expectation", "--graph", "split.txt", "--node", "0"), 3),
    (("expectation", "--graph", "digraph.json", "--node", "1", "--root", "0"), 3),
    (("enumerate", "--graph", "k4.json", "--cap", "3"), 5),
])
def test_exit_codes(argv, code):
    got, doc = cli(*argv)
    assert got == code
    assert doc is None


def test_non_integer_omega_capability(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1 1 0.5\n1 2 1\n")
    code, doc = execute(["distribution", "--graph", str(path), "--node", "0"])
    assert code == 5 and doc is None


def test_numerical_failure(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1 1\n1 2 1e-300\n")
    code, _ = execute(["expectation", "--graph", str(path), "--node", "0", "--root", "0"])
    assert code == 4


def test_check_skips_polynomial_for_real_omega(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1 1 0.5\n1 2 2 -1.5\n0 2 3 2\n")
    code, doc = execute(["check", "--graph", str(path)])
    assert code == 0
    assert doc["diagnostics"]["warnings"]


def test_run_prints_document(capsys):
    code = run(["tree-weight", "--graph", str(DATA / "wtri.json")])
    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out)["values"]["tree_weight"] == pytest.approx(11.0, rel=1e-14)


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "treedegree", "expectation", "--graph", str(DATA / "k4.json"), "--node", "0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["values"]["expectation"] == 1.5
    proc = subprocess.run(
        [sys.executable, "-m", "treedegree", "expectation", "--graph", str(DATA / "split.txt"), "--node", "0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 3
    assert proc.stdout == "" and "treedegree:" in proc.stderr


def test_failed_check_exits_4(monkeypatch):
    from treedegree import moments

    real = moments.expected_degree_via_edges
    monkeypatch.setattr(moments, "expected_degree_via_edges", lambda *a, **k: real(*a, **k) * (1 + 1e-6))
    code, doc = cli("check", "--graph", "wtri.json", "--node", "0")
    assert code == 4
    assert not doc["values"]["passed"]
    failed = [c["name"] for c in doc["values"]["checks"] if not c["passed"]]
    assert failed == ["duality[0]"]

"""Command-line parsing, outputs and exit codes."""

import json
import subprocess
import sys

import pytest

from ulm import cli


def run(argv):
    return cli.main(argv)


def test_classify(capsys):
    assert run(["classify", "--n", "6", "--k", "2"]) == 0
    assert capsys.readouterr().out.strip() == "yu"
    assert run(["classify", "--n", "4", "--k", "2"]) == 0
    assert capsys.readouterr().out.strip() == "pi-modular"


@pytest.mark.parametrize("argv,needle", [
    (["build", "--n", "4", "--k", "2", "--family", "kramer", "--chart", "i:2,1"], "pi-modular"),
    (["count", "--n", "4", "--k", "1", "--q", "2", "--target", "chart", "--chart", "i:2,1"], "even characteristic"),
    (["count", "--n", "4", "--k", "1", "--q", "9", "--target", "exc-gluing"], "odd prime"),
    (["check", "--n", "4", "--k", "1", "--suite", "nope"], "unknown check"),
    (["check", "--n", "4", "--k", "1", "--suite", "all", "--chart", "i:2"], "malformed selector"),
    (["check", "--n", "4", "--k", "1", "--suite", "presentation", "--chart", "ii:2,1"], "has class i"),
    (["check", "--n", "4", "--k", "1", "--suite", "presentation", "--chart", "bl:2,4"], "does not fit"),
    (["build", "--n", "4", "--k", "1", "--family", "kramer"], "needs a chart"),
    (["build", "--n", "4", "--k", "1", "--family", "spl", "--chart", "bl:2,4"], "blowup only"),
    (["classify", "--n", "4", "--k", "3"], "0 <= k"),
    (["classify", "--n", "4"], "required"),
    (["frobnicate"], "invalid choice"),
    (["check", "--n", "4", "--k", "1", "--suite", "all", "--guard-pairs", "0"], "positive"),
])
def test_usage_errors(argv, needle, capsys):
    assert run(argv) == cli.EXIT_USAGE
    assert needle in capsys.readouterr().err


def test_check_pass_and_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["check", "--n", "4", "--k", "1", "--suite", "kramer-spin", "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert body["config"] == {"sign_variant": "sec33", "trace_variant": "two-pi"}
    assert len({c["chart"] for c in body["checks"]}) == 8
    assert all(c["status"] == "pass" for c in body["checks"])


def test_check_divergence_exit_code(tmp_path):
    out = tmp_path / "r.json"
    code = run(["check", "--n", "5", "--k", "1", "--suite", "kramer-spin", "--trace-variant", "pi", "--out", str(out)])
    assert code == cli.EXIT_FAIL
    body = json.loads(out.read_text())
    assert body["config"]["trace_variant"] == "pi"
    assert any(c["status"] == "fail" for c in body["checks"])


def test_check_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["check", "--n", "5", "--k", "1", "--suite", "presentation,pairing", "--no-timing", "--out"]
    assert run(argv + [str(a)]) == 0
    assert run(argv + [str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_check_empty_suite(capsys):
    assert run(["check", "--n", "4", "--k", "1", "--suite", ""]) == 0
    assert json.loads(capsys.readouterr().out)["checks"] == []


def test_guard_exit_code(tmp_path, monkeypatch):
    monkeypatch.delenv("ULM_GUARD_PAIRS", raising=False)
    out = tmp_path / "g.json"
    code = run(["check", "--n", "4", "--k", "1", "--suite", "blowup", "--chart", "bl:1,1", "--guard-pairs", "2",
                "--out", str(out)])
    assert code == cli.EXIT_GUARD
    assert json.loads(out.read_text())["checks"][0]["status"] == "guard"


def test_point_guard_exit_code(capsys):
    code = run(["count", "--n", "5", "--k", "1", "--q", "3", "--target", "chart", "--chart", "i:3,1",
                "--guard-points", "10"])
    assert code == cli.EXIT_GUARD


def test_io_error():
    assert run(["classify", "--n", "4", "--k", "1"]) == 0
    code = run(["check", "--n", "4", "--k", "1", "--suite", "pairing", "--out", "/nonexistent/dir/r.json"])
    assert code == cli.EXIT_IO


def test_build_writes_ideal_and_manifest(tmp_path):
    out = tmp_path / "c.ideal"
    assert run(["build", "--n", "4", "--k", "1", "--family", "spl", "--chart", "i:2,1", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1].startswith("ring: ")
    manifest = (tmp_path / "c.ideal.manifest").read_text()
    assert "chart: spl_n4_k1_i_2_1" in manifest and "trace_variant: two-pi" in manifest


def test_build_blowup_and_local(capsys):
    assert run(["build", "--n", "4", "--k", "1", "--family", "blowup", "--chart", "bl:2,4"]) == 0
    assert "varpi" in capsys.readouterr().out
    assert run(["build", "--n", "4", "--k", "1", "--family", "local"]) == 0


def test_count_components_csv(capsys):
    assert run(["count", "--n", "5", "--k", "1", "--q", "3", "--target", "components", "--chart", "i:2,1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "target,q,m,count,component,ms"
    assert "spl_n5_k1_i_2_1,3,9,81,Exc1,0" in lines
    union = [l for l in lines if l.endswith(",union,0")][0]
    direct = [l for l in lines if ",special-fiber," in l][0]
    assert union.split(",")[3] == direct.split(",")[3]


def test_count_exc_targets(capsys):
    assert run(["count", "--n", "4", "--k", "1", "--q", "3", "--target", "exc-incidence"]) == 0
    assert "bl,3,6,52,Exc1" in capsys.readouterr().out
    assert run(["count", "--n", "4", "--k", "1", "--q", "3", "--target", "exc-gluing"]) == 0
    assert "exc-gluing,3,0,52,Exc1" in capsys.readouterr().out


def test_count_chart_target(capsys):
    assert run(["count", "--n", "4", "--k", "1", "--q", "3", "--target", "chart", "--chart", "i:2,1",
                "--family", "class"]) == 0
    assert ",special-fiber," in capsys.readouterr().out


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "ulm", "classify", "--n", "5", "--k", "2"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip() == "almost-pi-modular"

import csv
import json

import pytest

from okv import runner
from okv.cli import main
from okv.errors import ConfigError
from okv.runner import validate_config

SMALL = {
    "seed": 5,
    "experiments": [
        {"id": "count", "type": "count", "model": {"n": 1, "q": "2"}, "m_list": [0, 1, 2, 3]},
        {"id": "vol", "type": "vol", "model": {"n": 1, "q": "3/2"}, "m_list": {"from": 1, "to": 20}},
        {"id": "gap", "type": "gap", "model": {"n": 1, "q": "2"}, "m_list": [1, 2, 3]},
        {"id": "sandwich", "type": "sandwich", "model": {"n": 1, "q": "2"},
         "flag": {"p": 3, "point": [0, 1], "chain": [0]}, "m_list": [0, 1, 2]},
        {"id": "fujita", "type": "fujita", "model": {"n": 1, "q": "2"}, "n_level": 1, "k_max": 2},
        {"id": "lambda", "type": "lambda", "instances": 10},
    ],
}


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_run_and_diff_are_deterministic(tmp_path, capsys):
    cfg = write(tmp_path, SMALL)
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", "--config", cfg, "--out", a]) == 0
    assert main(["run", "--config", cfg, "--out", b, "--jobs", "3"]) == 0
    capsys.readouterr()
    assert main(["diff", a, b]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["FAIL"] == [] and report["compared_rows"] > 0
    for eid in ("count", "gap", "fujita", "lambda"):
        ja = json.loads((tmp_path / "a" / f"{eid}.json").read_text())
        jb = json.loads((tmp_path / "b" / f"{eid}.json").read_text())
        assert ja == jb
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["exit_code"] == 0 and summary["config"] == SMALL
    with open(tmp_path / "a" / "series.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["count"] for r in rows] == ["3", "13", "129", "3649"]
    with open(tmp_path / "a" / "volumes.csv", newline="") as fh:
        assert {r["experiment_id"] for r in csv.DictReader(fh)} == {"vol"}


def test_diff_reports_changed_field(tmp_path, capsys):
    cfg = write(tmp_path, {"experiments": SMALL["experiments"][:1]})
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    main(["run", "--config", cfg, "--out", a])
    main(["run", "--config", cfg, "--out", b])
    path = tmp_path / "b" / "series.csv"
    path.write_text(path.read_text().replace(",129,129,", ",130,129,"))
    capsys.readouterr()
    assert main(["diff", a, b]) == 1
    fails = json.loads(capsys.readouterr().out)["FAIL"]
    assert any(f["field"] == "count" and f["b"] == "130" for f in fails)
    path.write_text("bogus,header\n")
    assert main(["diff", a, b]) == 2


@pytest.mark.parametrize("cfg,msg", [
    ({"experiments": [{"type": "vol", "model": {"n": 1, "q": "0"}, "m_list": [1]}]}, "schema"),
    ({"experiments": [{"type": "vol", "model": {"n": 1, "q": "0.0"}, "m_list": [1]}]}, "positive"),
    ({"experiments": [{"type": "lambda"}]}, "seed"),
    ({"experiments": [{"type": "vol", "model": {"n": 1, "q": "2"}}]}, "missing"),
    ({"experiments": [{"type": "sandwich", "model": {"n": 1, "q": "2"}, "m_list": [1],
                       "flag": {"p": 4, "point": [0, 1], "chain": [0]}}]}, "prime"),
    ({"experiments": [{"type": "lambda", "lattice": [[1, 0], [0, 1]], "ball": [[0, 0], [1, 0], [0, 1]]}]},
     "symmetric"),
    ({"experiments": [{"type": "nope"}]}, "schema"),
    ({"experiments": [{"type": "gap", "model": {"n": 1, "q": "2"}, "m_list": [1], "sigma": "abc"}]}, "sigma"),
])
def test_config_errors(tmp_path, cfg, msg):
    with pytest.raises(ConfigError, match=msg):
        validate_config(cfg)
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 2


def test_unreadable_config_and_bad_jobs(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2
    assert main(["run", "--config", write(tmp_path, SMALL), "--out", str(tmp_path / "o"), "--jobs", "0"]) == 2


def test_cap_exceeded_exit_code(tmp_path):
    cfg = {"caps": {"enum": 100}, "experiments": [
        {"type": "sandwich", "model": {"n": 1, "q": "2"}, "flag": {"p": 2, "point": [0, 1], "chain": [0]},
         "m_list": [6]}]}
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 3
    rec = json.loads((out / "sandwich-0.json").read_text())
    assert rec["status"] == "cap_exceeded" and "exceeds cap" in rec["result"]["error"]


def test_invariant_failure_and_crash_exit_code(tmp_path, monkeypatch):
    def failing(exp, ctx):
        return {"status": "fail", "rows": {}, "payload": {}, "failures": ["forced"]}

    def crashing(exp, ctx):
        raise RuntimeError("boom")

    cfg = write(tmp_path, {"experiments": SMALL["experiments"][:1]})
    monkeypatch.setitem(runner.RUNNERS, "count", failing)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "f")]) == 1
    monkeypatch.setitem(runner.RUNNERS, "count", crashing)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "c")]) == 1
    rec = json.loads((tmp_path / "c" / "count.json").read_text())
    assert rec["status"] == "error" and "boom" in rec["failures"][0]


def test_selftest_command(capsys):
    assert main(["selftest", "--seed", "3", "--instances", "40"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 6 and "FAIL" not in out

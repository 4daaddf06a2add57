from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from finflow.cache import Cache, IoError, make_key
from finflow.cli import main, run
from finflow.schemas import all_schemas, schema_text

DOCS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ramsey_positive(capsys):
    code, out, _ = call(capsys, "ramsey", "--kind", "set", "--c", "6", "--b", "3", "--a", "2", "--k", "2")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "positive"


def test_ramsey_negative_certificate(capsys):
    code, out, _ = call(capsys, "ramsey", "--kind", "set", "--c", "5", "--b", "3", "--a", "2", "--k", "2")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "negative"
    assert len(doc["result"]["certificate"]["bad_coloring"]["colors"]) == 10


def test_validation_errors(capsys):
    code, out, err = call(capsys, "ramsey", "--kind", "set", "--c", "5", "--b", "3")
    assert code == 2 and out == "" and "validation" in err
    code, _, _ = call(capsys, "samuel", "--group", "nope")
    assert code == 2
    code, _, _ = call(capsys, "ramsey", "--kind", "set", "--c", "5", "--b", "3", "--a", "2", "--k", "9")
    assert code == 2


def test_malformed_flags_exit_nonzero():
    proc = subprocess.run([sys.executable, "-m", "finflow", "ramsey", "--kind", "hexagon"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == ""


def test_resource_cap_exit(capsys):
    code, out, err = call(capsys, "ramsey", "--kind", "set", "--c", "8", "--b", "4", "--a", "2", "--k", "2",
                          "--budget-nodes", "100")
    assert code == 3 and out == "" and "resource" in err


def test_job_file_and_io_error(tmp_path, capsys):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "amenable", "params": {"group": "S3"}}))
    code, out, _ = call(capsys, "--job", str(job))
    assert code == 0 and json.loads(out)["verdict"] == "not extremely amenable"
    code, _, _ = call(capsys, "--job", str(tmp_path / "missing.json"))
    assert code == 5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"command": "amenable", "params": {"group": "S3", "extra": 1}}))
    code, _, _ = call(capsys, "--job", str(bad))
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["fraisse", "--class", "sets", "--bound", "3"],
    ["orders", "--class", "ordered-graphs", "--bound", "3"],
    ["flow", "--kind", "set", "--c", "3"],
    ["flow", "--group", "D4"],
    ["samuel", "--group", "S3", "--family", "1"],
    ["amenable", "--group", "C1"],
    ["catalog"],
    ["catalog", "--group", "S3"],
])
def test_commands_run(capsys, argv):
    code, out, _ = call(capsys, *argv)
    doc = json.loads(out)
    assert code == 0 and doc["command"] == argv[0]


def test_cache_round_trip(tmp_path):
    cache = Cache(tmp_path)
    key = make_key({"x": 1})
    assert cache.get(key) is None
    cache.put(key, {"a": [1, 2]})
    assert cache.get(key).value == {"a": [1, 2]}


def test_corrupt_entry_is_evicted(tmp_path):
    cache = Cache(tmp_path)
    key = make_key({"x": 2})
    cache.put(key, {"a": 1})
    path = cache.path(key)
    path.write_text(path.read_text().replace('"a":1', '"a":2'))
    assert cache.get(key) is None and not path.exists()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("{not json")
    assert cache.get(key) is None and not path.exists()


def test_cache_requires_directory(monkeypatch):
    monkeypatch.delenv("FINFLOW_CACHE_DIR", raising=False)
    with pytest.raises(IoError):
        Cache(None)


def test_cached_rerun_is_byte_identical(tmp_path, capsys):
    argv = ["ramsey", "--kind", "set", "--c", "5", "--b", "3", "--a", "2", "--k", "2", "--cache-dir", str(tmp_path)]
    _, first, err1 = call(capsys, *argv)
    _, second, err2 = call(capsys, *argv)
    assert first == second
    assert "cached" not in err1 and "cached" in err2


def test_cache_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FINFLOW_CACHE_DIR", str(tmp_path))
    call(capsys, "amenable", "--group", "C2")
    assert list(tmp_path.rglob("*.json"))


def test_worker_count_does_not_change_output():
    job = {"command": "ramsey", "params": {"kind": "set", "c": 6, "b": 3, "a": 2, "k": 2}}
    outs = {run({**job, "workers": w})[0] for w in (1, 2, 3)}
    assert len(outs) == 1


def test_schemas_in_docs_match_code():
    for name, schema in all_schemas().items():
        path = DOCS / f"{name}.v1.json"
        assert path.read_text() == schema_text(schema), name

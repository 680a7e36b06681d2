import json
import subprocess
import sys

import pytest

from bcfl.cli import main


@pytest.fixture
def grammars(tmp_path):
    paths = {}
    for name, text in {
        "dyck": "S -> S S | ( S ) | ( )\n",
        "single": "S -> a\n",
        "expr": "E -> E + E | E * E | x\n",
        "broken": "S -> A\n",
    }.items():
        p = tmp_path / f"{name}.cfg"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _meta(err):
    return json.loads(err.strip().splitlines()[0])


@pytest.mark.parametrize("text,expected", [("( _ )", "false"), ("( )", "true"), ("_ _", "true")])
def test_recognize(capsys, grammars, text, expected):
    code, out, _ = run(capsys, "recognize", grammars["dyck"], text)
    assert code == 0 and out.strip() == expected


def test_recognize_unknown_token(capsys, grammars):
    code, out, err = run(capsys, "recognize", grammars["dyck"], "( x )")
    assert code == 2 and "unknown token" in err and out == ""


@pytest.mark.parametrize("problem", ["missing", "broken"])
def test_input_errors(capsys, grammars, problem):
    path = grammars.get(problem, "/nonexistent/grammar.cfg")
    code, _, err = run(capsys, "count", path, "a")
    assert code == 2 and err.startswith("error:")


@pytest.mark.parametrize("text,expected", [("_ _ _ _", "2"), ("( (", "0"), ("( )", "1")])
def test_count(capsys, grammars, text, expected):
    code, out, err = run(capsys, "count", grammars["dyck"], text)
    assert code == 0 and out.strip() == expected
    meta = _meta(err)
    assert meta["count"] == expected and meta["porous_string"] == text


def test_sample_wor_yields(capsys, grammars):
    code, out, err = run(capsys, "sample", grammars["dyck"], "_ _ _ _", "--k", "2",
                         "--mode", "wor", "--format", "yield", "--seed", "11")
    assert code == 0
    assert sorted(out.splitlines()) == ["( ( ) )", "( ) ( )"]
    meta = _meta(err)
    assert meta["seed"] == 11 and meta["mode"] == "without-replacement"
    assert meta["stream"] == "lcg"


def test_sample_wor_too_many(capsys, grammars):
    code, out, err = run(capsys, "sample", grammars["dyck"], "_ _ _ _", "--k", "3", "--mode", "wor")
    assert code == 2 and "only 2 exist" in err and out == ""


def test_sample_single(capsys, grammars):
    code, out, _ = run(capsys, "sample", grammars["single"], "a", "--k", "1", "--seed", "0")
    assert code == 0 and out == "(S a)\n"


def test_sample_empty_language(capsys, grammars):
    code, out, _ = run(capsys, "sample", grammars["dyck"], "( (", "--seed", "0")
    assert code == 1 and out == ""


def test_sample_all_distinct(capsys, grammars):
    code, out, err = run(capsys, "sample", grammars["expr"], "_ _ _ _ _ _ _", "--k", "ALL",
                         "--mode", "wor", "--seed", "5")
    lines = out.splitlines()
    assert code == 0 and len(lines) == len(set(lines)) == int(_meta(err)["count"]) == 40


def test_sample_byte_identical(capsys, grammars):
    argv = ["sample", grammars["expr"], "_ _ _ _ _ _ _ _ _", "--k", "25", "--seed", "77"]
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first
    wor = argv + ["--mode", "wor"]
    assert run(capsys, *wor)[1] == run(capsys, *wor)[1]


def test_seed_from_environment(capsys, grammars, monkeypatch):
    monkeypatch.setenv("BCFL_SEED", "1234")
    _, out, err = run(capsys, "sample", grammars["expr"], "_ _ _ _ _", "--k", "3")
    assert _meta(err)["seed"] == 1234
    assert run(capsys, "sample", grammars["expr"], "_ _ _ _ _", "--k", "3", "--seed", "1234")[1] == out


def test_entropy_seed_is_echoed(capsys, grammars, monkeypatch):
    monkeypatch.delenv("BCFL_SEED", raising=False)
    _, _, err = run(capsys, "sample", grammars["expr"], "_ _ _", "--k", "1")
    assert isinstance(_meta(err)["seed"], int)


def test_jobs_preserve_stream_order(capsys, grammars):
    base = ["sample", grammars["expr"], "_ _ _ _ _ _ _ _ _ _ _", "--k", "all", "--mode", "wor",
            "--seed", "3"]
    serial = run(capsys, *base)[1]
    parallel = run(capsys, *base, "--jobs", "3")[1]
    assert serial == parallel and len(serial.splitlines()) == 1344


def test_explicit_weights(capsys, grammars, tmp_path):
    weights = tmp_path / "w.json"
    rules = run(capsys, "cnf", grammars["dyck"])[1].splitlines()
    weights.write_text(json.dumps({r: 1.0 for r in rules}))
    code, out, err = run(capsys, "sample", grammars["dyck"], "_ _ _ _", "--k", "5",
                         "--weighting", "explicit", "--weights", str(weights), "--seed", "1",
                         "--format", "yield")
    assert code == 0 and len(out.splitlines()) == 5
    assert _meta(err)["weighting"] == "explicit"


def test_explicit_weights_incomplete(capsys, grammars, tmp_path):
    weights = tmp_path / "w.json"
    weights.write_text(json.dumps({"S -> S S": 1.0}))
    code, _, err = run(capsys, "sample", grammars["dyck"], "_ _ _ _", "--weighting", "explicit",
                       "--weights", str(weights), "--seed", "1")
    assert code == 2 and "incomplete probability vector" in err


def test_enumerate_matches_oracle(capsys, grammars):
    _, ours, _ = run(capsys, "enumerate", grammars["expr"], "x _ _ _ x")
    _, ref, _ = run(capsys, "enumerate", grammars["expr"], "x _ _ _ x", "--oracle")
    assert sorted(ours.splitlines()) == ref.splitlines()
    assert len(ref.splitlines()) == 8


def test_module_entry_point(grammars):
    out = subprocess.run([sys.executable, "-m", "bcfl", "count", grammars["dyck"], "_ _ _ _"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "2"

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from nsts.cli import main
from nsts.parser import parse_program, parse_query
from nsts.search import find_derivation

BENCH = Path(__file__).parent.parent / "demos" / "benchmarks"


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def prog(tmp_path):
    f = tmp_path / "p.pl"
    f.write_text("p(a).\n")
    return str(f)


def test_solve_single_fact(prog, tmp_path):
    stats = tmp_path / "stats.json"
    trace = tmp_path / "trace.txt"
    code, out = run(["solve", "--program", prog, "--query", "p(X)", "--oracle", "null",
                     "--stats", str(stats), "--trace", str(trace)])
    assert code == 0 and out == "X = a\n"
    d = json.loads(stats.read_text())
    assert d["status"] == "Solved" and d["answers"] == ["X = a"] and d["oracle_calls"] == 1
    assert trace.read_text().splitlines()[-1] == "ANSWER X = a"


def test_unknown_oracle_is_usage_error(prog):
    assert run(["solve", "--program", prog, "--query", "p(X)", "--oracle", "oracle9000"])[0] == 2


def test_unsat_exit_one(prog, tmp_path):
    stats = tmp_path / "s.json"
    code, out = run(["solve", "--program", prog, "--query", "p(b)", "--stats", str(stats)])
    assert code == 1 and out == ""
    assert json.loads(stats.read_text())["status"] == "ExhaustedFiniteSpace"


@pytest.mark.parametrize("argv", [
    ["solve", "--program", "/nonexistent.pl", "--query", "p(X)"],
    ["solve", "--query", "p(X)"],
    ["solve", "--program", "{prog}", "--query", "p(X"],
    ["solve", "--program", "{prog}", "--query", "p(X)", "--oracle", "scripted"],
    ["solve", "--program", "{prog}", "--query", "p(X)", "--oracle", "perfect"],
    ["solve", "--program", "{prog}", "--query", "p(X)", "--depth-step", "0"],
    ["solve", "--program", "{prog}", "--query", "p(X)", "--max-answers", "many"],
    ["solve", "--program", "{prog}", "--query", "p(X)", "--prompts-dir", "/nonexistent"],
    ["solve", "--program", "{prog}", "--query", "p(X)", "--config", "/nonexistent.json"],
    ["solve", "--program", "{prog}", "--query", "p(X)", "--oracle", "llm", "--llm-endpoint",
     "https://api.example.test/v1", "--llm-model", "m"],
])
def test_usage_errors(argv, prog, monkeypatch):
    monkeypatch.delenv("NSTS_LLM_API_KEY", raising=False)
    argv = [a.replace("{prog}", prog) for a in argv]
    try:
        code = run(argv)[0]
    except SystemExit as e:  # argparse rejects missing required flags itself
        code = e.code
    assert code == 2


def test_scripted_and_perfect_files(tmp_path):
    src = "p(X) :- q(X). q(a). q(b)."
    (tmp_path / "p.pl").write_text(src)
    d = find_derivation(parse_program(src), parse_query("p(b)"))
    (tmp_path / "perfect.json").write_text(json.dumps(d.to_dict()))
    (tmp_path / "script.json").write_text(json.dumps(
        ["no idea", {"solution": {"X": "b"}, "derivation": d.to_dict()}]))
    base = ["solve", "--program", str(tmp_path / "p.pl"), "--query", "p(X)"]
    assert run(base + ["--oracle", f"perfect:{tmp_path / 'perfect.json'}"])[1] == "X = b\n"
    assert run(base + ["--oracle", f"scripted:{tmp_path / 'script.json'}"])[1] == "X = a\n"
    assert run(base + ["--oracle", "adversarial", "--max-answers", "all"])[1] == "X = a\nX = b\n"


def test_config_file_precedence(prog, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"search": {"max_answers": "all", "node_budget": 1}}))
    src = tmp_path / "two.pl"
    src.write_text("p(a). p(b).")
    code, out = run(["solve", "--program", str(src), "--query", "p(X)", "--config", str(cfg)])
    assert out == "X = a\nX = b\n"
    code, out = run(["solve", "--program", str(src), "--query", "p(X)", "--config", str(cfg), "--max-answers", "1"])
    assert out == "X = a\n"


def test_synth_perfect_and_adversarial(tmp_path):
    b = str(BENCH / "add_one.json")
    s1, s2 = tmp_path / "a.json", tmp_path / "b.json"
    code, out = run(["synth", b, "--oracle", "perfect", "--stats", str(s1)])
    assert code == 0 and out == "X = binop(add, var(x), const(1))\n"
    code, out2 = run(["synth", b, "--oracle", "adversarial", "--stats", str(s2)])
    assert code == 0 and out2 == out
    n1 = json.loads(s1.read_text())["nodes_expanded"]
    n2 = json.loads(s2.read_text())["nodes_expanded"]
    assert n2 > n1


def test_synth_malformed_benchmark(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{\"variables\": [\"x\"], ")
    assert run(["synth", str(f)])[0] == 2
    f.write_text(json.dumps({"variables": ["x"], "max_depth": 2, "examples": []}))
    assert run(["synth", str(f)])[0] == 2


def _table(out):
    rows = [l.split() for l in out.strip().splitlines()]
    return {r[0]: dict(zip(rows[0], r)) for r in rows[1:]}


def test_compare_adversarial():
    code, out = run(["compare", str(BENCH / "add_one.json"), "--oracle", "adversarial", "--oracle-budget", "50"])
    t = _table(out)
    assert t["nsts"]["status"] == "Solved" and t["sequential"]["status"] == "BudgetExceeded"
    assert t["sequential"]["oracle_calls"] == "50" and int(t["nsts"]["oracle_calls"]) <= 16


def test_compare_perfect_and_null():
    t = _table(run(["compare", str(BENCH / "add_one.json"), "--oracle", "perfect"])[1])
    assert t["nsts"]["status"] == t["sequential"]["status"] == "Solved"
    assert t["sequential"]["oracle_calls"] == "1"
    t = _table(run(["compare", str(BENCH / "add_one.json"), "--oracle", "null"])[1])
    assert t["sequential"]["status"] == "BudgetExceeded" and t["sequential"]["oracle_calls"] == "1"
    assert t["nsts"]["status"] == "Solved"


def test_compare_program_and_stats(prog, tmp_path):
    stats = tmp_path / "cmp.json"
    code, out = run(["compare", "--program", prog, "--query", "p(X)", "--stats", str(stats), "--no-timing"])
    d = json.loads(stats.read_text())
    assert set(d) == {"nsts", "sequential"} and d["nsts"]["wall_ms"] is None
    assert run(["compare"])[0] == 2


def test_stats_round_trip_and_determinism(tmp_path):
    outs = []
    for _ in range(3):
        outs.append(run(["synth", str(BENCH / "add_one.json"), "--oracle", "adversarial", "--stats", "-", "--no-timing"])[1])
    assert outs[0] == outs[1] == outs[2]
    stats = json.loads(outs[0][outs[0].index("{"):])
    assert list(stats) == ["status", "answers", "nodes_expanded", "transitions", "oracle_calls", "refutations", "wall_ms"]


def test_console_script_installed(prog):
    r = subprocess.run([sys.executable, "-m", "nsts.cli", "solve", "--program", prog, "--query", "p(X)"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "X = a\n"

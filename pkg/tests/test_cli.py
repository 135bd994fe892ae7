import json
import subprocess
import sys

import numpy as np
import pytest

from dynapsp.cli import OpsFormatError, fmt, main, parse_ops
from dynapsp.graph import format_graph
from support import ops_text, random_graph, random_ops

FIELDS = {"update_index", "op", "time_ms", "phi", "c_size", "mode", "seed"}


@pytest.fixture
def files(tmp_path):
    rng = np.random.default_rng(7)
    g = random_graph(20, 0.15, rng)
    ops = random_ops(g, 12, rng, 0.15)
    gp = tmp_path / "g.txt"
    op = tmp_path / "ops.txt"
    gp.write_text(format_graph(g))
    op.write_text(ops_text(g, ops) + "query 0 1\ndump\n")
    return tmp_path, str(gp), str(op)


def test_parse_ops_roundtrip():
    ops = parse_ops("# comment\ndel 3\nins 5 1 1\n0 2\n1 4\nquery 0 1\ndump\n")
    assert [o.kind for o in ops] == ["del", "ins", "query", "dump"]
    assert ops[1].out_nbrs == ((0, 2.0),) and ops[1].in_nbrs == ((1, 4.0),)


@pytest.mark.parametrize("text,line", [
    ("del\n", 1),
    ("del 1\nfoo 2\n", 2),
    ("ins 3 1 0\n", 1),
    ("ins 3 1 0\n0\n", 2),
    ("ins 3 1 0\n0 -1\n", 2),
    ("query 1\n", 1),
    ("dump 3\n", 1),
])
def test_parse_ops_errors(text, line):
    with pytest.raises(OpsFormatError) as err:
        parse_ops(text)
    assert err.value.line == line


def test_fmt():
    assert fmt(np.inf) == "inf" and fmt(3.0) == "3" and fmt(2.5) == "2.5"


@pytest.mark.parametrize("mode", ["det", "fast", "space", "rand"])
def test_verify_ok(files, mode, capsys):
    _, g, ops = files
    assert main(["verify", "--graph", g, "--ops", ops, "--mode", mode]) == 0
    out = capsys.readouterr().out.splitlines()
    rows = out[1:]
    assert len(rows) >= 20
    assert all(len(r.split()) == len(rows) for r in rows)


def test_verify_sliced_and_overrides(files):
    _, g, ops = files
    assert main(["verify", "--graph", g, "--ops", ops, "--sliced", "--h", "3", "--delta", "2",
                 "--tau", "5000"]) == 0


def test_verify_detects_fault(files, capsys):
    _, g, ops = files
    assert main(["verify", "--graph", g, "--ops", ops, "--inject-fault"]) == 1
    assert "mismatch" in capsys.readouterr().err


def test_bad_ops_line(files, capsys):
    tmp, g, _ = files
    bad = tmp / "bad.txt"
    bad.write_text("del 1\nins 99 0 0\nfrob\n")
    assert main(["verify", "--graph", g, "--ops", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_bad_graph_file(tmp_path, capsys):
    gp = tmp_path / "g.txt"
    gp.write_text("3 1\n0 1 x\n")
    op = tmp_path / "ops.txt"
    op.write_text("")
    assert main(["verify", "--graph", str(gp), "--ops", str(op)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_invalid_update(files, capsys):
    tmp, g, _ = files
    bad = tmp / "bad.txt"
    bad.write_text("del 1\ndel 1\n")
    assert main(["verify", "--graph", g, "--ops", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    bad.write_text("ins 7 0 0\n")
    assert main(["verify", "--graph", g, "--ops", str(bad)]) == 2


def _stats(path):
    with open(path) as f:
        return [json.loads(line) for line in f]


def test_bench_stats_schema_and_determinism(files):
    tmp, g, ops = files
    a, b = tmp / "a.jsonl", tmp / "b.jsonl"
    for p in (a, b):
        assert main(["bench", "--graph", g, "--ops", ops, "--mode", "rand", "--seed", "7",
                     "--stats", str(p)]) == 0
    ra, rb = _stats(a), _stats(b)
    assert len(ra) == 12
    for k, row in enumerate(ra):
        assert set(row) == FIELDS
        assert row["update_index"] == k and row["mode"] == "rand" and row["seed"] == 7
        assert row["op"] in ("del", "ins")
    strip = lambda rows: [{k: v for k, v in r.items() if k != "time_ms"} for r in rows]
    assert strip(ra) == strip(rb)


def test_bench_baseline(files):
    tmp, g, ops = files
    p = tmp / "s.jsonl"
    assert main(["bench", "--graph", g, "--ops", ops, "--baseline", "--stats", str(p)]) == 0
    assert all("static_ms" in r for r in _stats(p))


def test_query_and_dump_output(tmp_path, capsys):
    gp = tmp_path / "g.txt"
    gp.write_text("5 5\n0 1 1\n1 2 1\n2 3 1\n3 4 1\n4 0 1\n")
    op = tmp_path / "ops.txt"
    op.write_text("query 0 3\ndel 2\nquery 0 3\ndump\n")
    assert main(["verify", "--graph", str(gp), "--ops", str(op)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "3" and out[1] == "inf"
    assert out[2] == "0 1 inf inf inf"
    assert len(out) == 2 + 5


def test_console_script(files):
    _, g, ops = files
    proc = subprocess.run([sys.executable, "-m", "dynapsp.cli", "verify", "--graph", g,
                           "--ops", ops], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verified" in proc.stderr

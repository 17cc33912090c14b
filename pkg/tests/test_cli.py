import json

import pytest

from gedindex.cli import main

P3_P2 = """\
g 0 3
v 0 A
v 1 B
v 2 A
e 0 1
e 1 2

g 1 2
v 0 A
v 1 B
e 0 1
"""


@pytest.fixture
def pair_file(tmp_path):
    p = tmp_path / "pair.txt"
    p.write_text(P3_P2)
    return p


@pytest.fixture
def db_file(tmp_path):
    from gedindex.datasets import write_dataset
    from gedindex.synth import random_database

    p = tmp_path / "db.txt"
    write_dataset(random_database(40, 1, 6, seed=4), p, "edgelist")
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_stats(capsys, pair_file, tmp_path):
    code, out, _ = run(capsys, "stats", "--dataset", pair_file, "--format", "edgelist")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.split("\t")[:3] == ["dataset", "graphs", "avg_vertices"]
    assert row.split("\t")[1:3] == ["2", "2.5"]
    empty = tmp_path / "empty"
    empty.mkdir()
    code, out, _ = run(capsys, "stats", "--dataset", empty, "--format", "edgelist", "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == 1 and obj["graphs"] == 0


def test_bounds_pair(capsys, pair_file):
    code, out, _ = run(capsys, "bounds", "--dataset", pair_file, "--format", "edgelist",
                       "--pair", 0, 1, "--exact", "--json")
    assert code == 0
    r = json.loads(out)
    assert r["exact"] == 2
    assert r["slf"] <= r["clb"] <= r["branch_lb"] <= 2 <= r["branch_ub"]


def test_build_range_knn(capsys, db_file, tmp_path):
    idx = tmp_path / "db.idx"
    code, out, _ = run(capsys, "build", "--dataset", db_file, "--format", "edgelist",
                       "--index", idx)
    assert code == 0 and idx.exists()
    code, out, _ = run(capsys, "range", "--index", idx, "--query", 5, "--radius", 0,
                       "--verify", "exact", "--json")
    assert code == 0
    r = json.loads(out)
    assert [5, 0.0] in r["answers"] and r["command"] == "range"
    code, out, _ = run(capsys, "range", "--index", idx, "--query", 5, "--radius", 2)
    lines = out.strip().splitlines()
    assert lines[0] == "query\tradius\tid\tdistance" and len(lines) >= 2
    code, out, _ = run(capsys, "knn", "--index", idx, "--query", 7, "--k", 1, "--json")
    r = json.loads(out)
    assert code == 0 and r["answers"][0][1] == 0.0
    code, out, _ = run(capsys, "range", "--index", idx, "--query", 7, "--radius", 2,
                       "--extra-filter", "branch", "--json")
    assert code == 0


def test_query_file(capsys, db_file, tmp_path):
    q = tmp_path / "q.txt"
    q.write_text("g 0 2\nv 0 0\nv 1 unseen\ne 0 1\n")
    code, out, _ = run(capsys, "knn", "--dataset", db_file, "--format", "edgelist",
                       "--query-file", q, "--k", 2, "--json")
    assert code == 0 and len(json.loads(out)["answers"]) >= 2


def test_bench(capsys, db_file):
    args = ("bench", "--dataset", db_file, "--format", "edgelist", "--queries", 10,
            "--radii", "1,2,3,4,5", "--seed", 3, "--json")
    code, out, _ = run(capsys, *args)
    assert code == 0
    rep = json.loads(out)
    cands = [row["mean_candidates"] for row in rep["rows"]]
    assert len(rep["rows"]) == 5 and cands == sorted(cands)
    _, again, _ = run(capsys, *args)
    assert [r["mean_candidates"] for r in json.loads(again)["rows"]] == cands
    _, slf_out, _ = run(capsys, *args[:-1], "--bound", "slf", "--json")
    slf_rows = json.loads(slf_out)["rows"]
    assert json.loads(slf_out)["queries"] == rep["queries"]
    for a, b in zip(rep["rows"], slf_rows):
        assert a["mean_candidates"] <= b["mean_candidates"]
    code, out, _ = run(capsys, *args[:-1], "--verify", "exact")
    assert code == 0 and out.startswith("# dataset=")


def exit_code(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


@pytest.mark.parametrize("argv, code", [
    (["range", "--radius", "1"], 1),                      # no dataset
    (["frobnicate"], 1),                                  # unknown command
    (["knn", "--k", "x"], 1),                             # bad int
    (["stats", "--threads", "0", "--dataset", "x"], 1),
    (["stats", "--dataset", "/nonexistent/X"], 2),
    (["range", "--index", "/nonexistent.idx", "--query", "0", "--radius", "1"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert exit_code(argv) == code
    capsys.readouterr()


def test_data_and_cost_errors(capsys, pair_file, tmp_path):
    code, _, err = run(capsys, "bounds", "--dataset", pair_file, "--format", "edgelist",
                       "--pair", 0, 1, "--costs", "1,1,3,1")
    assert code == 4 and "cost model" in err
    code, _, _ = run(capsys, "bounds", "--dataset", pair_file, "--format", "edgelist",
                     "--pair", 0, 1, "--costs", "1,1")
    assert code == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("g 0 1\nv 0 A\ne 0 4\n")
    code, _, err = run(capsys, "stats", "--dataset", bad, "--format", "edgelist")
    assert code == 3 and "bad.txt:3" in err
    junk = tmp_path / "junk.idx"
    junk.write_bytes(b"nope" * 10)
    code, _, _ = run(capsys, "range", "--index", junk, "--query", 0, "--radius", 1)
    assert code == 3
    code, _, _ = run(capsys, "bounds", "--dataset", pair_file, "--format", "edgelist",
                     "--pair", 0, 9)
    assert code == 1


def test_label_cost_table(capsys, pair_file, tmp_path):
    t = tmp_path / "t.csv"
    t.write_text(",A,B\nA,0,0.5\nB,0.5,0\n")
    code, out, _ = run(capsys, "bounds", "--dataset", pair_file, "--format", "edgelist",
                       "--pair", 0, 1, "--label-costs", t, "--exact", "--json")
    assert code == 0
    r = json.loads(out)
    assert r["llb"] <= r["exact"] <= r["branch_ub"]

import csv
import io
import json

import pytest

from coret.cli import main
from coret.synth import message_trace


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    t3 = tmp_path / "T3.txt"
    t3.write_text("0 1 1\n1 2 2\n0 2 3\n")
    t3x = tmp_path / "T3x.txt"
    t3x.write_text("0 1 1\n1 2 2\n0 2 3\n0 1 4\n")
    return t3, t3x


def test_query_ttis(files):
    _, t3x = files
    code, out = run("query", "--input", str(t3x), "--k", "2", "--ts", "0", "--te", "4", "--output", "ttis")
    assert code == 0
    assert out == "1 3\n1 4\n2 4\n"


def test_query_naive_same_stream(files):
    _, t3x = files
    for mode in ("ttis", "full"):
        a = run("query", "--input", str(t3x), "--k", "2", "--output", mode)
        b = run("query", "--input", str(t3x), "--k", "2", "--output", mode, "--algorithm", "naive")
        assert a == b


def test_query_summary(files):
    t3, _ = files
    code, out = run("query", "--input", str(t3), "--k", "5")
    assert code == 0
    assert "cores=0" in out.splitlines()
    assert "vertices=3" in out and "temporal_edges=3" in out


def test_query_full_restores_original_labels(tmp_path):
    p = tmp_path / "raw.txt"
    p.write_text("10 20 100\n20 30 200\n10 30 300\n")
    code, out = run("query", "--input", str(p), "--k", "2", "--output", "full")
    assert code == 0
    rec = json.loads(out)
    assert rec == {"tti": [100, 300], "anchor": 100, "te": 300, "vertices": [10, 20, 30],
                   "edges": [[10, 20, 100], [20, 30, 200], [10, 30, 300]]}


def test_query_out_file(files, tmp_path):
    _, t3x = files
    dest = tmp_path / "cores.jsonl"
    code, out = run("query", "--input", str(t3x), "--k", "2", "--output", "full", "--out", str(dest))
    assert code == 0 and "cores=3" in out
    assert len(dest.read_text().splitlines()) == 3


def test_alpha_window(files):
    _, t3x = files
    code, out = run("query", "--input", str(t3x), "--k", "2", "--alpha", "0.5", "--no-normalize")
    assert code == 0 and "window=0..2" in out


@pytest.mark.parametrize("argv,code", [
    (["query", "--k", "2"], 1),
    (["query", "--input", "{t3}", "--k", "2", "--alpha", "0.5", "--ts", "0"], 1),
    (["query", "--input", "{t3}", "--k", "2", "--alpha", "1.5"], 1),
    (["query", "--input", "{t3}", "--k", "2", "--ts", "3", "--te", "1"], 1),
    (["query", "--input", "{t3}", "--k", "0"], 1),
    (["query", "--input", "{missing}", "--k", "2"], 2),
    (["query", "--input", "{bad}", "--k", "2"], 2),
    (["stats", "--input", "{bad}"], 2),
    (["bench", "--input", "{t3}", "--reps", "0"], 1),
    (["frobnicate"], 1),
])
def test_exit_codes(files, tmp_path, argv, code):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 1\n0 1\n")
    paths = {"t3": files[0], "missing": tmp_path / "nope.txt", "bad": bad}
    argv = [a.format(**paths) for a in argv]
    assert run(*argv)[0] == code


def test_stats(files):
    t3, _ = files
    code, out = run("stats", "--input", str(t3), "--no-normalize")
    assert code == 0
    fields = dict(line.split("=") for line in out.splitlines())
    assert (fields["vertices"], fields["temporal_edges"], fields["t_max"]) == ("3", "3", "3")
    code, out = run("stats", "--input", str(t3))
    assert "t_max=2" in out and "distinct_timestamps=3" in out


def test_verify_ok():
    assert run("verify", "--instances", "0") == (0, "0/0 OK\n")
    assert run("verify", "--instances", "200", "--seed", "7") == (0, "200/200 OK\n")


@pytest.mark.parametrize("reentry", ["raise", "ignore"])
def test_verify_catches_mutant(tmp_path, reentry):
    dest = tmp_path / "cx"
    code, out = run("verify", "--instances", "500", "--seed", "7", "--update-order", "ascending",
                    "--on-reentry", reentry, "--out", str(dest))
    assert code == 3
    assert "MISMATCH" in out
    assert {p.name for p in dest.iterdir()} == {"instance.txt", "coret.json", "naive.json"}
    # the dumped instance reloads and reproduces the oracle side
    header = (dest / "instance.txt").read_text().splitlines()[0]
    k = int(header.split("k=")[1].split()[0])
    _, ttis = run("query", "--input", str(dest / "instance.txt"), "--k", str(k), "--no-normalize",
                  "--output", "ttis")
    naive = json.loads((dest / "naive.json").read_text())["cores"]
    assert sorted(tuple(map(int, l.split())) for l in ttis.splitlines()) == \
        sorted(tuple(c["tti"]) for c in naive)


def test_bench_rows(files, tmp_path):
    _, t3x = files
    dest = tmp_path / "bench.csv"
    code, _ = run("bench", "--input", str(t3x), "--k", "2", "--alpha", "1.0", "--out", str(dest),
                  "--algorithm", "coret", "naive")
    assert code == 0
    rows = list(csv.DictReader(dest.open()))
    assert [(r["algorithm"], r["cores"]) for r in rows] == [("coret", "3"), ("naive", "3")]
    assert rows[0]["dataset"] == "T3x" and float(rows[0]["ms"]) >= 0


def test_bench_grid_and_timeout(tmp_path):
    p = tmp_path / "trace.txt"
    p.write_text("".join(f"{u} {v} {t}\n" for u, v, t in message_trace(1, n=150, messages=2500, ticks=2000)))
    code, out = run("bench", "--input", str(p), "--k", "2", "3", "--alpha", "0.5", "1.0",
                    "--algorithm", "coret", "naive", "--timeout-secs", "1")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["dataset", "algorithm", "k", "alpha", "ms", "cores"]
    assert len(rows) == 1 + 2 * 2 * 2
    assert all(len(r) == 6 for r in rows)
    naive = [r for r in rows[1:] if r[1] == "naive"]
    assert all(r[4] == "timeout" and r[5] == "timeout" for r in naive)
    assert all(r[4] != "timeout" for r in rows[1:] if r[1] == "coret")

import csv
import json
import math

import pytest

from partoracle.cli import main
from partoracle.graph import Partition, load_graph, validate_partition
from partoracle.harness import growth_exponent


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_generate_writes_graph(tmp_path):
    assert main(["generate", "--kind", "grid", "--n", "36", "--out", str(tmp_path)]) == 0
    g = load_graph((tmp_path / "graph.txt").read_text())
    assert g.n == 36 and g.m == 60
    assert read_csv(tmp_path / "summary.csv")[0]["m"] == "60"


def test_partition_bit_identical_and_roundtrips(tmp_path):
    main(["generate", "--kind", "random_triangulation", "--n", "400", "--seed", "2", "--out", str(tmp_path / "g")])
    gpath = str(tmp_path / "g" / "graph.txt")
    for run in ("a", "b"):
        assert main(["partition", "--input", gpath, "--eps", "0.3", "--seed", "7", "--out", str(tmp_path / run)]) == 0
    a = (tmp_path / "a" / "partition.json").read_bytes()
    assert a == (tmp_path / "b" / "partition.json").read_bytes()
    g = load_graph(open(gpath).read())
    p = Partition.from_json(a.decode(), g.n)
    assert validate_partition(g, p, 1.0, 3 * 4096).conditions() <= {"cut"}
    rounds = [json.loads(x) for x in (tmp_path / "a" / "telemetry.jsonl").read_text().splitlines()]
    assert rounds[0]["round"] == 1 and "w_after_breakup" in rounds[0]


def test_partition_multiple_seeds(tmp_path):
    assert main(["partition", "--kind", "grid", "--n", "400", "--seeds", "3", "--k", "30", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "summary.csv")
    assert [r["seed"] for r in rows] == ["0", "1", "2"]
    assert all((tmp_path / f"partition_seed{s}.json").exists() for s in range(3))


def test_equivalence_report(tmp_path, capsys):
    assert main(["equivalence", "--kind", "random_triangulation", "--n", "100", "--seeds", "20", "--out", str(tmp_path)]) == 0
    assert "20/20 exact matches" in capsys.readouterr().out
    assert read_csv(tmp_path / "summary.csv")[0]["matches"] == "20"


def test_bench_csv(tmp_path):
    assert main(["bench", "--kind", "grid", "--n", "400", "--eps", "0.5,0.25,0.125", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "summary.csv")
    assert [float(r["eps"]) for r in rows] == [0.5, 0.25, 0.125]
    for r in rows:
        assert int(r["max_query_probes"]) <= 10 ** float(r["log10_q_bound"])
    # measured probes are non-decreasing as a trend over the sweep
    assert int(rows[-1]["max_cold_query_probes"]) >= int(rows[0]["max_cold_query_probes"])


def test_oracle_command(tmp_path):
    assert main(["oracle", "--kind", "grid", "--n", "100", "--vertices", "0,5,99", "--k", "10", "--out", str(tmp_path)]) == 0
    lines = [json.loads(x) for x in (tmp_path / "telemetry.jsonl").read_text().splitlines()]
    assert [x["vertex"] for x in lines] == [0, 5, 99]
    assert read_csv(tmp_path / "summary.csv")[0]["queries"] == "3"


def test_test_and_approx_commands(tmp_path):
    assert main(["test", "--kind", "grid", "--n", "400", "--eps", "0.3", "--out", str(tmp_path / "t")]) == 0
    assert read_csv(tmp_path / "t" / "summary.csv")[0]["decision"] == "accept"
    assert main(["approx", "--kind", "grid", "--n", "36", "--eps", "0.25", "--exact", "--out", str(tmp_path / "a")]) == 0
    for r in read_csv(tmp_path / "a" / "summary.csv"):
        assert abs(float(r["estimate"]) - int(r["exact"])) <= 0.25 * 36


@pytest.mark.parametrize(
    "argv",
    [
        ["partition", "--kind", "grid", "--n", "9", "--eps", "2"],
        ["partition", "--kind", "grid", "--n", "9", "--seeds", "0"],
        ["partition", "--eps", "0.3"],
        ["frobnicate"],
        ["partition", "--kind", "grid", "--n", "7"],
        ["partition", "--input", "/nonexistent/graph.txt"],
    ],
)
def test_bad_flags_exit_two(argv, tmp_path):
    argv = argv + ["--out", str(tmp_path)] if argv[0] != "frobnicate" else argv
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_malformed_graph_file_exit_two(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("n=2\n0 0\n")
    assert main(["partition", "--input", str(bad), "--out", str(tmp_path)]) == 2


def test_invariant_violation_exit_one(tmp_path, monkeypatch):
    from partoracle import cli

    monkeypatch.setattr(cli.harness, "structural_violations", lambda *a: ["part at 0 is disconnected"])
    assert main(["partition", "--kind", "grid", "--n", "16", "--out", str(tmp_path)]) == 1
    assert "disconnected" in (tmp_path / "violations.txt").read_text()


def test_growth_exponent_recovers_power():
    xs = [0.5, 1.0, 1.5, 2.0, 2.5]
    alpha, b = growth_exponent(xs, [3 + 2 * x**1.5 for x in xs])
    assert math.isclose(alpha, 1.5, abs_tol=0.06) and b > 0
    alpha, b = growth_exponent(xs, [5.0] * 5)
    assert abs(b) < 1e-9

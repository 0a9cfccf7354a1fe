import json
import os

import numpy as np

from graphreg.cli import main
from graphreg.graphs import UndirectedGraph
from graphreg.io import (
    read_dataset_csv,
    read_graph_csv,
    read_problem_json,
    write_dataset_csv,
    write_graph_csv,
)
from graphreg.linalg import standard_normal, stream
from graphreg.simulate import Dataset


def _tree_bytes(root):
    out = {}
    for base, _, names in os.walk(root):
        for name in names:
            path = os.path.join(base, name)
            with open(path, "rb") as fh:
                out[os.path.relpath(path, root)] = fh.read()
    return out


def test_graph_csv_round_trip(tmp_path):
    g = UndirectedGraph(5, edges=[(0, 3), (1, 2), (2, 4)])
    path = tmp_path / "g.csv"
    write_graph_csv(g, path)
    text = path.read_text()
    assert text.splitlines()[0] == "i,j"
    assert read_graph_csv(path, p=5) == g
    # reversed order on read is accepted
    path2 = tmp_path / "g2.csv"
    path2.write_text("i,j\n3,0\n2,1\n4,2\n")
    assert read_graph_csv(path2, p=5) == g


def test_dataset_csv_round_trip(tmp_path):
    gen = stream(0, 0)
    ds = Dataset(X=standard_normal(gen, (7, 3)), y=standard_normal(gen, 7))
    path = tmp_path / "d.csv"
    write_dataset_csv(ds, path)
    header = path.read_text().splitlines()[0]
    assert header == "x0,x1,x2,y"
    back = read_dataset_csv(path)
    assert np.array_equal(back.X, ds.X)
    assert np.array_equal(back.y, ds.y)


def test_simulate_layout_and_determinism(tmp_path):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    args = ["simulate", "--scenario", "random", "--p", "12", "--parents", "2",
            "--reps", "3", "--n", "25", "--seed", "7"]
    assert main(args + ["--out", out1]) == 0
    assert main(args + ["--out", out2]) == 0
    tree1, tree2 = _tree_bytes(out1), _tree_bytes(out2)
    assert tree1 == tree2
    reps = [k for k in tree1 if k.endswith("dataset.csv")]
    assert len(reps) == 6
    assert "random/parent0/rep0/problem.json" in tree1
    assert "random/parent1/rep2/graph.csv" in tree1


def test_simulate_problem_json_contents(tmp_path):
    out = str(tmp_path / "sim")
    assert main(["simulate", "--scenario", "band", "--p", "10", "--parents", "1",
                 "--reps", "1", "--n", "20", "--seed", "3", "--out", out]) == 0
    payload = read_problem_json(os.path.join(out, "band", "parent0", "rep0", "problem.json"))
    assert payload["spec"]["kind"] == "band"
    assert payload["beta_true"].shape == (10,)
    assert payload["graph"].p == 10
    assert payload["graph"].edges() == [(i, i + 1) for i in range(9)]


def test_simulate_requires_seed(tmp_path, capsys):
    code = main(["simulate", "--scenario", "random", "--out", str(tmp_path / "x")])
    assert code == 1
    assert "seed" in capsys.readouterr().err


def test_estimate_graph_independent_columns(tmp_path):
    gen = stream(5, 0)
    ds = Dataset(X=standard_normal(gen, (300, 5)), y=standard_normal(gen, 300))
    data = tmp_path / "data.csv"
    write_dataset_csv(ds, data)
    out = tmp_path / "est.csv"
    assert main(["estimate-graph", "--data", str(data), "--out", str(out)]) == 0
    assert out.read_text() == "i,j\n"


def test_estimate_graph_rules_nested(tmp_path):
    gen = stream(6, 0)
    base = standard_normal(gen, (400, 3))
    X = np.column_stack([base[:, 0], 0.9 * base[:, 0] + 0.3 * base[:, 1], base[:, 2]])
    ds = Dataset(X=X, y=standard_normal(gen, 400))
    data = tmp_path / "d.csv"
    write_dataset_csv(ds, data)
    out_or = tmp_path / "or.csv"
    out_and = tmp_path / "and.csv"
    assert main(["estimate-graph", "--data", str(data), "--rule", "or", "--out", str(out_or)]) == 0
    assert main(["estimate-graph", "--data", str(data), "--rule", "and", "--out", str(out_and)]) == 0
    g_or = read_graph_csv(out_or, p=3)
    g_and = read_graph_csv(out_and, p=3)
    assert set(g_and.edges()) <= set(g_or.edges())


def test_consensus_cli(tmp_path):
    a = UndirectedGraph(4, edges=[(0, 1), (1, 2)])
    b = UndirectedGraph(4, edges=[(0, 1)])
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    write_graph_csv(a, pa)
    write_graph_csv(b, pb)
    out = tmp_path / "cons"
    assert main(["consensus", str(pa), str(pb), "--threshold", "1", "--p", "4",
                 "--out", str(out)]) == 0
    agreed = read_graph_csv(str(out) + ".csv", p=4)
    assert agreed.edges() == [(0, 1)]
    counts = (tmp_path / "cons.counts.csv").read_text().splitlines()
    assert counts[0] == "i,j,count"
    assert "0,1,2" in counts


def test_cli_usage_error_exit_code(capsys):
    assert main(["consensus", "missing.csv"]) == 1  # no --out
    assert "out" in capsys.readouterr().err


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    code = main(["estimate-graph", "--data", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "o.csv")])
    assert code == 2


def test_tune_cli_smoke(tmp_path):
    out = str(tmp_path / "sim")
    assert main(["simulate", "--scenario", "band", "--p", "8", "--parents", "1",
                 "--reps", "1", "--n", "60", "--seed", "11", "--out", out]) == 0
    rep_dir = os.path.join(out, "band", "parent0", "rep0")
    tune_out = str(tmp_path / "tuned")
    code = main([
        "tune", "--data", os.path.join(rep_dir, "dataset.csv"),
        "--graph", os.path.join(rep_dir, "graph.csv"),
        "--model", "srig", "--n-lambda", "4",
        "--splits", "fixed", "--train", "30", "--val", "15", "--test", "15",
        "--truth", os.path.join(rep_dir, "problem.json"),
        "--seed", "2", "--out", tune_out,
    ])
    assert code == 0
    report = json.load(open(os.path.join(tune_out, "report_000.json")))
    assert report["model"] == "srig"
    assert len(report["grid"]) == 4
    assert os.path.exists(os.path.join(tune_out, "summary.csv"))
    runs = open(os.path.join(tune_out, "runs.csv")).read().splitlines()
    assert runs[0].startswith("scenario,model,p,")


def test_benchmark_cli_smoke(tmp_path):
    out = str(tmp_path / "bench")
    code = main([
        "benchmark", "--scenario", "band", "--models", "srig",
        "--p", "8", "--parents", "1", "--reps", "1", "--n", "60",
        "--train", "30", "--val", "15", "--test", "15",
        "--n-lambda", "4", "--graph", "true", "--threads", "1",
        "--seed", "5", "--out", out,
    ])
    assert code == 0
    summary = open(os.path.join(out, "summary.csv")).read().splitlines()
    assert summary[0] == "scenario,model,p,edges,l2_distance,test_mse,seconds"
    assert summary[1].startswith("band,srig,8,")
    assert os.path.exists(os.path.join(out, "detail.csv"))


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scenario": "random", "p": 8, "parents": 1, "reps": 1, "n": 40,
        "seed": 3, "out": str(tmp_path / "cfg_out"),
    }))
    # flag --p overrides the config value
    out = str(tmp_path / "flag_out")
    assert main(["--config", str(cfg), "simulate", "--p", "6", "--out", out]) == 0
    ds = read_dataset_csv(os.path.join(out, "random", "parent0", "rep0", "dataset.csv"))
    assert ds.p == 6


def test_unknown_model_rejected(tmp_path, capsys):
    code = main(["benchmark", "--scenario", "random", "--models", "wat",
                 "--seed", "1", "--out", str(tmp_path / "x")])
    assert code == 1


def test_tune_cli_default_grid_has_fifty_rows(tmp_path):
    out = str(tmp_path / "sim")
    assert main(["simulate", "--scenario", "band", "--p", "6", "--parents", "1",
                 "--reps", "1", "--n", "50", "--seed", "4", "--out", out]) == 0
    rep_dir = os.path.join(out, "band", "parent0", "rep0")
    tune_out = str(tmp_path / "tuned")
    code = main([
        "tune", "--data", os.path.join(rep_dir, "dataset.csv"),
        "--graph", os.path.join(rep_dir, "graph.csv"),
        "--model", "srig",
        "--splits", "fixed", "--train", "24", "--val", "13", "--test", "13",
        "--seed", "2", "--out", tune_out,
    ])
    assert code == 0
    report = json.load(open(os.path.join(tune_out, "report_000.json")))
    assert len(report["grid"]) == 50


def test_simulate_default_counts_are_hundred(tmp_path):
    out = str(tmp_path / "bulk")
    assert main(["simulate", "--scenario", "two_class", "--p", "20", "--n", "30",
                 "--seed", "9", "--out", out]) == 0
    reps = []
    for base, _, names in os.walk(out):
        reps.extend(n for n in names if n == "dataset.csv")
    assert len(reps) == 100  # 10 parent graphs x 10 replicates


def test_global_flag_positions(tmp_path):
    out = str(tmp_path / "gpos")
    code = main(["--seed", "3", "--out", out, "simulate", "--scenario", "band",
                 "--p", "5", "--parents", "1", "--reps", "1", "--n", "10"])
    assert code == 0
    assert os.path.exists(os.path.join(out, "band", "parent0", "rep0", "dataset.csv"))


def test_simulate_failure_removes_partial_output(tmp_path, capsys):
    # parent0 succeeds, parent1 has a degenerate (edgeless) structure matrix
    out = str(tmp_path / "part")
    code = main(["simulate", "--scenario", "random", "--p", "6", "--parents", "2",
                 "--reps", "1", "--n", "20", "--seed", "1", "--out", out])
    assert code == 2
    leftovers = []
    for base, _, names in os.walk(out):
        leftovers.extend(names)
    assert leftovers == []


def test_python_dash_m_entry_point(tmp_path):
    import subprocess, sys
    out = str(tmp_path / "m")
    proc = subprocess.run(
        [sys.executable, "-m", "graphreg", "simulate", "--scenario", "band",
         "--p", "5", "--parents", "1", "--reps", "1", "--n", "10",
         "--seed", "2", "--out", out],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert os.path.exists(os.path.join(out, "band", "parent0", "rep0", "dataset.csv"))

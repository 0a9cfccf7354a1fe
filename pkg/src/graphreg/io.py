"""CSV and JSON wire formats.

All files are UTF-8 with LF line endings and fixed headers.  Floats are
written with shortest round-trip formatting, so re-running a deterministic
command reproduces byte-identical data files.

* graph CSV: header ``i,j`` (one undirected edge per row, i < j on write,
  either order accepted on read); consensus tallies add a ``count`` column.
* dataset CSV: header ``x0,...,x{p-1},y``.
* problem JSON: scenario spec, delta, support, true coefficients, edges.
"""

import csv
import json

import numpy as np

from .graphs import UndirectedGraph
from .simulate import Dataset


def _fmt(x):
    return repr(float(x))


def write_graph_csv(graph, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("i,j\n")
        for i, j in graph.edges():
            fh.write(f"{i},{j}\n")


def read_graph_csv(path, p=None):
    """Read an edge list; node count is inferred unless ``p`` is given."""
    edges = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["i", "j"]:
            raise ValueError(f"{path}: expected header starting with 'i,j'")
        for row in reader:
            if not row:
                continue
            i, j = int(row[0]), int(row[1])
            edges.append((min(i, j), max(i, j)))
    if p is None:
        p = 1 + max((max(e) for e in edges), default=-1)
    return UndirectedGraph(p, edges=edges)


def write_edge_counts_csv(edge_counts, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("i,j,count\n")
        for (i, j), c in edge_counts.counts.items():
            fh.write(f"{i},{j},{c}\n")


def write_dataset_csv(dataset, path):
    p = dataset.p
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join([f"x{k}" for k in range(p)] + ["y"]) + "\n")
        for row, yi in zip(dataset.X, dataset.y):
            fh.write(",".join([_fmt(v) for v in row] + [_fmt(yi)]) + "\n")


def read_dataset_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[-1] != "y" or not header[0].startswith("x"):
            raise ValueError(f"{path}: expected header 'x0,...,y'")
        rows = [row for row in reader if row]
    data = np.array([[float(v) for v in row] for row in rows])
    return Dataset(X=data[:, :-1], y=data[:, -1])


def write_problem_json(problem, path):
    payload = {
        "spec": {
            "kind": problem.spec.kind,
            "p": problem.spec.p,
            "seed": problem.spec.seed,
        },
        "delta": problem.delta,
        "support": [int(i) for i in problem.support],
        "beta_true": [float(v) for v in problem.beta_true],
        "edges": [[int(i), int(j)] for i, j in problem.graph.edges()],
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_problem_json(path):
    """Problem summary: dict with spec fields, truth, and the true graph."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    p = payload["spec"]["p"]
    return {
        "spec": payload["spec"],
        "delta": payload["delta"],
        "support": np.array(payload["support"], dtype=np.intp),
        "beta_true": np.array(payload["beta_true"], dtype=np.float64),
        "graph": UndirectedGraph(p, edges=[tuple(e) for e in payload["edges"]]),
    }


def write_report_json(report, path):
    payload = {
        "model": report.kind,
        "best_params": report.best_params,
        "val_mse": report.val_mse,
        "test_mse": report.test_mse,
        "test_mse_std": report.test_mse_std,
        "l2_distance": report.l2_distance,
        "nonzero": report.nonzero,
        "lam_max": report.lam_max,
        "wall_time": report.wall_time,
        "n_failed": report.n_failed,
        "intercept": report.intercept,
        "beta": [float(v) for v in report.beta_orig],
        "grid": report.entries,
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


SUMMARY_COLUMNS = ("scenario", "model", "p", "edges", "l2_distance", "test_mse", "seconds")

DETAIL_COLUMNS = (
    "scenario", "model", "p", "parent", "dataset_index", "edges",
    "l2_distance", "test_mse", "test_mse_std", "val_mse", "nonzero",
    "lam_max", "seconds", "n_failed",
)


def _write_rows_csv(rows, columns, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for col in columns:
                value = row[col]
                cells.append(_fmt(value) if isinstance(value, float) else str(value))
            fh.write(",".join(cells) + "\n")


def write_summary_csv(rows, path):
    _write_rows_csv(rows, SUMMARY_COLUMNS, path)


def write_detail_csv(records, path):
    _write_rows_csv(records, DETAIL_COLUMNS, path)

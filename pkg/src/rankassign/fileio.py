"""On-disk formats: instance, graph, prediction, solution, manifest, results CSV.

All files are UTF-8 JSON except the results table, which is CSV with one
header row. Infinite costs are serialized as the string "inf"; NaN is
rejected on both read and write. Instances and predictions are paired by a
shared identifier (the file stem, echoed in manifests and prediction files).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .cost_model import CostMatrix, RankedSolution, validate_cost_matrix
from .errors import InvalidEntry, ManifestMismatch
from .graphify import BipartiteGraph

RESULTS_COLUMNS = [
    "instance_id",
    "method",
    "k",
    "wp",
    "mean_cost",
    "acc_1",
    "acc_2",
    "acc_3",
    "acc_4",
    "wall_time_us",
]


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _encode_cost(v: float):
    if math.isinf(v):
        return "inf"
    if math.isnan(v):
        raise InvalidEntry("NaN cannot be serialized")
    return float(v)


def _decode_cost(v) -> float:
    if isinstance(v, str):
        if v == "inf":
            return math.inf
        raise InvalidEntry(f"unrecognized cost string {v!r}")
    v = float(v)
    if math.isnan(v):
        raise InvalidEntry("NaN is not a legal cost entry")
    return v


def _dump(path, payload) -> None:
    Path(path).write_text(
        json.dumps(payload, allow_nan=False, indent=1) + "\n", encoding="utf-8"
    )


def _load(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_instance(path, C: CostMatrix, labels=None) -> None:
    payload = {
        "num_tracks": C.num_tracks,
        "num_measurements": C.num_measurements,
        "detected": [[_encode_cost(v) for v in row] for row in C.detected],
        "misdetect": [float(v) for v in C.misdetect],
    }
    if labels is not None:
        payload["labels"] = [[int(c) for c in cols] for cols in labels]
    _dump(path, payload)


def read_instance(path) -> tuple[CostMatrix, list[list[int]] | None]:
    data = _load(path)
    detected = [[_decode_cost(v) for v in row] for row in data["detected"]]
    C = validate_cost_matrix(
        data["num_tracks"], data["num_measurements"], detected, data["misdetect"]
    )
    labels = data.get("labels")
    if labels is not None:
        labels = [[int(c) for c in cols] for cols in labels]
    return C, labels


def write_graph(path, graph_id: str, G: BipartiteGraph) -> None:
    payload = {
        "id": graph_id,
        "num_source": G.num_source,
        "num_target": G.num_target,
        "source_features": [[float(v) for v in row] for row in G.source_features],
        "target_features": [[float(v) for v in row] for row in G.target_features],
        "edges": [[int(s), int(t)] for s, t in G.edges],
        "edge_attrs": [float(v) for v in G.edge_attrs],
    }
    _dump(path, payload)


def read_graph(path) -> tuple[str, BipartiteGraph]:
    data = _load(path)
    src = np.array(data["source_features"], dtype=float).reshape(data["num_source"], -1)
    tgt = np.array(data["target_features"], dtype=float).reshape(data["num_target"], -1)
    src.flags.writeable = False
    tgt.flags.writeable = False
    attrs = np.array(data["edge_attrs"], dtype=float)
    attrs.flags.writeable = False
    G = BipartiteGraph(
        num_source=int(data["num_source"]),
        num_target=int(data["num_target"]),
        source_features=src,
        target_features=tgt,
        edges=tuple((int(s), int(t)) for s, t in data["edges"]),
        edge_attrs=attrs,
    )
    return data["id"], G


def write_predictions(path, pred_id: str, values) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ManifestMismatch("prediction values must be a 2-D array")
    payload = {
        "id": pred_id,
        "k_max": int(values.shape[1]),
        "values": [[float(v) for v in row] for row in values],
    }
    _dump(path, payload)


def read_predictions(path) -> tuple[str, np.ndarray]:
    data = _load(path)
    values = np.array(data["values"], dtype=float)
    if values.ndim != 2 or values.shape[1] != int(data["k_max"]):
        raise ManifestMismatch(f"prediction file {path} is inconsistent with its k_max")
    return data["id"], values


def write_solution(path, sol_id: str, method: str, sol: RankedSolution) -> None:
    payload = {
        "id": sol_id,
        "method": method,
        "requested_k": sol.requested_k,
        "assignments": [
            {"columns": [int(c) for c in a.columns], "cost": float(a.cost)} for a in sol
        ],
    }
    _dump(path, payload)


def write_manifest(path, manifest: dict) -> None:
    _dump(path, manifest)


def read_manifest(path) -> dict:
    data = _load(path)
    for key in ("seed", "k_max", "instances"):
        if key not in data:
            raise ManifestMismatch(f"manifest is missing field {key!r}")
    return data


def write_results_csv(path, rows) -> None:
    """Rows are dicts keyed by RESULTS_COLUMNS; absent accuracies stay empty."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULTS_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({col: row.get(col, "") for col in RESULTS_COLUMNS})


def write_table_csv(path, columns, rows, header_comments=()) -> None:
    """Generic CSV with optional leading comment lines (used by sweep/time)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_comments:
            fh.write(f"# {line}\n")
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        for row in rows:
            writer.writerow({col: row.get(col, "") for col in columns})

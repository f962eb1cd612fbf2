"""File formats: instances, graphs, predictions, manifests, results CSV."""

import csv
import json
import math

import numpy as np
import pytest

from rankassign import fileio, normalize_graph, to_bipartite, validate_cost_matrix
from rankassign.errors import InvalidEntry, ManifestMismatch

INF = float("inf")


class TestInstanceFiles:
    def test_round_trip_with_gating(self, tmp_path, tiny):
        path = tmp_path / "inst.json"
        fileio.write_instance(path, tiny)
        C, labels = fileio.read_instance(path)
        assert labels is None
        assert np.array_equal(C.detected, tiny.detected)
        assert np.array_equal(C.misdetect, tiny.misdetect)

    def test_infinity_serialized_as_string(self, tmp_path):
        C = validate_cost_matrix(1, 2, [[INF, 3.0]], [1.0])
        path = tmp_path / "inst.json"
        fileio.write_instance(path, C)
        raw = path.read_text(encoding="utf-8")
        assert '"inf"' in raw
        assert "Infinity" not in raw
        back, _ = fileio.read_instance(path)
        assert math.isinf(back.detected[0, 0])

    def test_canonical_field_order(self, tmp_path, tiny):
        path = tmp_path / "inst.json"
        fileio.write_instance(path, tiny, labels=[[0, 2]])
        keys = list(json.loads(path.read_text(encoding="utf-8")).keys())
        assert keys == ["num_tracks", "num_measurements", "detected", "misdetect", "labels"]

    def test_labels_round_trip(self, tmp_path, tiny):
        path = tmp_path / "inst.json"
        fileio.write_instance(path, tiny, labels=[[0, 2], [1, 0]])
        _, labels = fileio.read_instance(path)
        assert labels == [[0, 2], [1, 0]]

    def test_nan_rejected_on_read(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            '{"num_tracks": 1, "num_measurements": 1, "detected": [["nan"]], "misdetect": [1.0]}',
            encoding="utf-8",
        )
        with pytest.raises(InvalidEntry):
            fileio.read_instance(path)


class TestGraphFiles:
    def test_round_trip(self, tmp_path, tiny):
        G = normalize_graph(to_bipartite(tiny))
        path = tmp_path / "g.json"
        fileio.write_graph(path, "inst-1", G)
        gid, back = fileio.read_graph(path)
        assert gid == "inst-1"
        assert back.edges == G.edges
        assert np.allclose(back.edge_attrs, G.edge_attrs)
        assert np.allclose(back.source_features, G.source_features)
        assert np.allclose(back.target_features, G.target_features)


class TestPredictionFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "p.json"
        values = np.array([[0.1, 0.9], [0.5, 0.4]])
        fileio.write_predictions(path, "inst-1", values)
        pid, back = fileio.read_predictions(path)
        assert pid == "inst-1"
        assert np.allclose(back, values)

    def test_inconsistent_k_max_rejected(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(
            '{"id": "x", "k_max": 3, "values": [[0.1, 0.2]]}', encoding="utf-8"
        )
        with pytest.raises(ManifestMismatch):
            fileio.read_predictions(path)


class TestResultsCsv:
    def test_schema_is_fixed(self, tmp_path):
        path = tmp_path / "results.csv"
        fileio.write_results_csv(
            path,
            [
                {
                    "instance_id": "a",
                    "method": "murty",
                    "k": 2,
                    "wp": "3.000000",
                    "mean_cost": "1.0",
                    "acc_1": "1",
                    "acc_2": "1",
                    "wall_time_us": "12.0",
                }
            ],
        )
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0].keys()) == fileio.RESULTS_COLUMNS
        assert rows[0]["acc_3"] == ""  # absent ranks stay empty

    def test_table_csv_comments(self, tmp_path):
        path = tmp_path / "t.csv"
        fileio.write_table_csv(path, ["a", "b"], [{"a": 1, "b": 2}], header_comments=["cpu: x"])
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# cpu: x"
        assert lines[1] == "a,b"

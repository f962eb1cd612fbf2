"""Bipartite-graph encoding of cost matrices.

Rows become source nodes, columns target nodes, finite entries become edges
carrying the cost as attribute. Node features summarize the matching line of
the full matrix with five statistics computed over its finite entries. The
edge list is sorted row-major (source, target); that canonical order is the
contract binding prediction-matrix rows to edges everywhere in this repo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cost_model import CostMatrix

FEATURE_DIM = 5


@dataclass(frozen=True)
class BipartiteGraph:
    num_source: int
    num_target: int
    source_features: np.ndarray  # (num_source, 5)
    target_features: np.ndarray  # (num_target, 5)
    edges: tuple[tuple[int, int], ...]  # row-major canonical order
    edge_attrs: np.ndarray  # (len(edges),)


def line_features(values, line_length: int) -> list[float]:
    """Five summary features of one row or column of the full matrix.

    [finite ratio, min, max, mean, l2 norm]; the last four are aggregated
    over the finite entries only. A fully gated line maps to all zeros.
    """
    finite = [float(v) for v in values if math.isfinite(v)]
    if not finite:
        return [0.0, 0.0, 0.0, 0.0, 0.0]
    ratio = len(finite) / line_length
    l2 = math.sqrt(sum(v * v for v in finite))
    return [ratio, min(finite), max(finite), sum(finite) / len(finite), l2]


def to_bipartite(C: CostMatrix) -> BipartiteGraph:
    """Encode a cost matrix as a bipartite graph with per-line node features."""
    full = C.full
    ns, nt = C.num_tracks, C.num_columns

    src = np.array([line_features(full[i, :], nt) for i in range(ns)])
    tgt = np.array([line_features(full[:, j], ns) for j in range(nt)])

    edges: list[tuple[int, int]] = []
    attrs: list[float] = []
    for i in range(ns):
        for j in range(nt):
            if math.isfinite(full[i, j]):
                edges.append((i, j))
                attrs.append(float(full[i, j]))

    attr_arr = np.array(attrs, dtype=float)
    src.flags.writeable = False
    tgt.flags.writeable = False
    attr_arr.flags.writeable = False
    return BipartiteGraph(
        num_source=ns,
        num_target=nt,
        source_features=src,
        target_features=tgt,
        edges=tuple(edges),
        edge_attrs=attr_arr,
    )


def _minmax(values: np.ndarray) -> np.ndarray:
    lo = values.min()
    hi = values.max()
    if hi - lo == 0.0:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def normalize_graph(G: BipartiteGraph) -> BipartiteGraph:
    """Min-max scale features and attributes into [0, 1], per graph.

    Each of the five feature dimensions is scaled over the union of source
    and target nodes; edge attributes are scaled over all edges. Constant
    dimensions map to zero. The input graph is left untouched.
    """
    if len(G.edges) < 1:
        raise ValueError("graph has no edges")

    stacked = np.vstack([G.source_features, G.target_features])
    scaled = np.column_stack([_minmax(stacked[:, d]) for d in range(FEATURE_DIM)])
    src = scaled[: G.num_source].copy()
    tgt = scaled[G.num_source :].copy()
    attrs = _minmax(np.asarray(G.edge_attrs, dtype=float))

    src.flags.writeable = False
    tgt.flags.writeable = False
    attrs.flags.writeable = False
    return BipartiteGraph(
        num_source=G.num_source,
        num_target=G.num_target,
        source_features=src,
        target_features=tgt,
        edges=G.edges,
        edge_attrs=attrs,
    )

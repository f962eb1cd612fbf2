"""Greedy extraction of valid ranked assignments from soft edge scores.

A prediction carries one score column per candidate solution, rows bound to
the graph's canonical edge order. Each column is scattered to a dense matrix,
the row-argmax is taken as a candidate, and rows holding several scores above
the significance threshold are greedily expanded into additional candidates.
Invalid candidates are dropped; survivors from all columns are pooled,
deduplicated, cost-sorted, and truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost_model import Assignment, CostMatrix, RankedSolution, assignment_cost, is_valid_assignment
from .errors import ManifestMismatch
from .graphify import BipartiteGraph

DEFAULT_THETA_SIG = 0.5


@dataclass(frozen=True)
class PredictionMatrix:
    """Soft edge scores in [0,1], shape (num edges, k_max)."""

    values: np.ndarray
    graph: BipartiteGraph
    k_max: int

    def __post_init__(self):
        if self.values.shape != (len(self.graph.edges), self.k_max):
            raise ManifestMismatch(
                f"prediction shape {self.values.shape} does not match "
                f"{len(self.graph.edges)} edges x k_max={self.k_max}"
            )
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ManifestMismatch("prediction values must lie in [0, 1]")


def column_to_dense(pred: PredictionMatrix, i: int) -> np.ndarray:
    """Scatter score column i onto a dense source x target matrix (zeros off-edge)."""
    G = pred.graph
    dense = np.zeros((G.num_source, G.num_target))
    for e, (s, t) in enumerate(G.edges):
        dense[s, t] = pred.values[e, i]
    return dense


def _candidates_from_dense(dense: np.ndarray, theta_sig: float) -> list[tuple[int, ...]]:
    """Row-argmax candidate plus greedy expansions of multiply-assigned rows.

    While some row holds at least two scores >= theta_sig, the row with the
    most such scores (lowest index on ties) has its current max zeroed and
    the new row-argmax vector is added as a candidate. Terminates because
    every iteration zeroes one score >= theta_sig.
    """
    work = dense.copy()
    found: list[tuple[int, ...]] = []

    def argmax_rows() -> tuple[int, ...]:
        # np.argmax returns the lowest index on ties, the tie rule used here.
        return tuple(int(j) for j in work.argmax(axis=1))

    found.append(argmax_rows())
    counts = (work >= theta_sig).sum(axis=1)
    while counts.max(initial=0) >= 2:
        row = int(counts.argmax())
        work[row, int(work[row].argmax())] = 0.0
        candidate = argmax_rows()
        if candidate not in found:
            found.append(candidate)
        counts = (work >= theta_sig).sum(axis=1)
    return found


def greedy_post_process(
    pred: PredictionMatrix,
    C: CostMatrix,
    theta_sig: float = DEFAULT_THETA_SIG,
    k_max: int | None = None,
) -> RankedSolution:
    """Decode every prediction column, keep the valid candidates, rank by cost.

    k_max caps the number of returned solutions; it is a parameter of the
    decoding stage (default: the prediction's own column count, the usual
    case where the predictor emits exactly k_max columns). Returns distinct
    assignments sorted by (cost, columns); may be empty when no candidate is
    valid. Per-column work is independent, so callers may parallelize across
    columns without changing the result.
    """
    if not 0.0 < theta_sig < 1.0:
        raise ValueError("theta_sig must lie in (0, 1)")
    if pred.graph.num_source != C.num_tracks or pred.graph.num_target != C.num_columns:
        raise ManifestMismatch("prediction graph does not match the cost matrix")
    if k_max is None:
        k_max = pred.k_max
    if k_max < 1:
        raise ValueError("k_max must be >= 1")

    pool: dict[tuple[int, ...], float] = {}
    for i in range(pred.k_max):
        dense = column_to_dense(pred, i)
        for candidate in _candidates_from_dense(dense, theta_sig):
            if candidate not in pool and is_valid_assignment(C, candidate):
                pool[candidate] = assignment_cost(C, candidate)

    ranked = sorted(pool.items(), key=lambda item: (item[1], item[0]))
    top = tuple(Assignment(columns=c, cost=cost) for c, cost in ranked[:k_max])
    return RankedSolution(assignments=top, requested_k=k_max)

"""Optimal assignment and Murty's k-best ranked assignment.

murty_k_best is the ground-truth producer for evaluation and training labels:
it partitions the solution space by forcing/excluding track-column pairs and
re-solving the constrained linear assignment problem for each cell.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cost_model import COST_TOL, INF, Assignment, CostMatrix, RankedSolution
from .errors import Infeasible

Pair = tuple[int, int]


@dataclass(frozen=True)
class MurtySubproblem:
    """One cell of the Murty partition: constraints plus its optimal solution."""

    forced: frozenset[Pair]
    excluded: frozenset[Pair]
    best: Assignment


def solve_linear(C: CostMatrix, forced=(), excluded=()) -> Assignment:
    """Minimum-cost valid assignment honoring forced/excluded pairs.

    Forced pairs are removed by row/column reduction; excluded pairs are set
    to the infinity sentinel on a per-call working copy. Raises Infeasible
    when no complete finite assignment exists.
    """
    ns, nt = C.num_tracks, C.num_columns
    work = np.array(C.full)
    for r, c in excluded:
        work[r, c] = INF

    forced_rows: dict[int, int] = {}
    forced_cols: set[int] = set()
    for r, c in forced:
        if r in forced_rows or c in forced_cols:
            raise Infeasible("conflicting forced pairs")
        if not np.isfinite(work[r, c]):
            raise Infeasible(f"forced pair ({r},{c}) references a gated entry")
        forced_rows[r] = c
        forced_cols.add(c)

    free_rows = [r for r in range(ns) if r not in forced_rows]
    free_cols = [c for c in range(nt) if c not in forced_cols]
    columns = [-1] * ns
    cost = 0.0
    for r, c in forced_rows.items():
        columns[r] = c
        cost += work[r, c]

    if free_rows:
        sub = work[np.ix_(free_rows, free_cols)]
        # Rows with no finite entry left make the subproblem infeasible; scipy
        # also raises for that case, but check up front for a clear error.
        if not np.all(np.isfinite(sub).any(axis=1)):
            raise Infeasible("a row has no admissible column left")
        try:
            rows, cols = linear_sum_assignment(sub)
        except ValueError as exc:
            raise Infeasible(str(exc)) from exc
        chosen = sub[rows, cols]
        if not np.all(np.isfinite(chosen)):
            raise Infeasible("no finite complete assignment under the constraints")
        for rr, cc in zip(rows, cols):
            columns[free_rows[rr]] = free_cols[cc]
        cost += float(chosen.sum())

    return Assignment(columns=tuple(columns), cost=float(cost))


def murty_k_best(C: CostMatrix, k: int) -> RankedSolution:
    """The k minimum-cost valid assignments in non-decreasing cost order.

    Standard Murty partitioning on a priority queue keyed by (cost, insertion
    counter). Because the queue yields non-decreasing costs, equal-cost
    solutions (within COST_TOL) are buffered and emitted in lexicographic
    column order, matching the enumeration oracle's tie rule.
    """
    if k < 1:
        raise ValueError("k must be >= 1")

    root = solve_linear(C)  # never infeasible: the misdetection diagonal is finite
    counter = 0
    heap: list[tuple[float, int, MurtySubproblem]] = [
        (root.cost, counter, MurtySubproblem(frozenset(), frozenset(), root))
    ]

    emitted: list[Assignment] = []
    group: list[Assignment] = []
    group_cost = 0.0

    def flush() -> None:
        group.sort(key=lambda a: a.columns)
        emitted.extend(group)
        group.clear()

    while heap:
        if len(emitted) >= k and heap[0][0] > group_cost + COST_TOL:
            break
        cost, _, sub = heapq.heappop(heap)
        if group and cost > group_cost + COST_TOL:
            flush()
            if len(emitted) >= k:
                break
        if not group:
            group_cost = cost
        group.append(sub.best)

        # Partition the popped cell: child j keeps the best solution's pairs on
        # the free rows before j and forbids the pair at row j.
        forced = set(sub.forced)
        forced_rows = {r for r, _ in sub.forced}
        for row in range(C.num_tracks):
            if row in forced_rows:
                continue
            pair = (row, sub.best.columns[row])
            excluded = sub.excluded | {pair}
            try:
                best = solve_linear(C, forced=frozenset(forced), excluded=excluded)
            except Infeasible:
                forced.add(pair)
                continue
            counter += 1
            child = MurtySubproblem(frozenset(forced), frozenset(excluded), best)
            heapq.heappush(heap, (best.cost, counter, child))
            forced.add(pair)

    flush()
    return RankedSolution(assignments=tuple(emitted[:k]), requested_k=k)

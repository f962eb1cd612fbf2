"""Gibbs-sampling approximation of the ranked assignment problem.

The chain starts at the optimal assignment and sweeps the rows, resampling one
track's column at a time from the columns that are finite in that row and not
taken by another track, with probability proportional to exp(-cost). Every
visited state is kept; the distinct states, cost-sorted, approximate the k
best assignments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost_model import Assignment, CostMatrix, RankedSolution
from .exact import solve_linear

# Sweeps per row when the caller gives no budget.
DEFAULT_SWEEPS_PER_ROW = 100

# RNG is numpy's PCG64 (seeded Generator); pinned so identical (C, cfg) give
# identical output on every platform.
_RNG_ALGORITHM = "PCG64"


@dataclass(frozen=True)
class GibbsConfig:
    iterations: int  # full sweeps over the rows
    seed: int
    k: int

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")


def default_iterations(num_tracks: int) -> int:
    return DEFAULT_SWEEPS_PER_ROW * num_tracks


def gibbs_sample(C: CostMatrix, cfg: GibbsConfig) -> RankedSolution:
    """Run one chain and return the distinct visited assignments, best first.

    Initialization at solve_linear(C) guarantees the rank-1 result is optimal.
    The misdetection column of row i is always in its support (no other row
    can take it), so the conditional is never empty and every visited state
    is a valid assignment.
    """
    ns = C.num_tracks
    full = C.full

    # Per-row support and sampling weights. Weights are shifted by the row
    # minimum before exponentiation; a common factor per row cancels in the
    # conditional, so this only buys numerical head-room.
    row_cols: list[list[int]] = []
    row_weights: list[list[float]] = []
    for i in range(ns):
        cols = np.flatnonzero(np.isfinite(full[i]))
        w = np.exp(-(full[i, cols] - full[i, cols].min()))
        row_cols.append(cols.tolist())
        row_weights.append(w.tolist())

    init = solve_linear(C)
    cols = list(init.columns)
    used = [False] * C.num_columns
    for c in cols:
        used[c] = True

    seen: set[tuple[int, ...]] = {tuple(cols)}
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    uniforms = rng.random(cfg.iterations * ns)
    step = 0

    for _ in range(cfg.iterations):
        for i in range(ns):
            cur = cols[i]
            used[cur] = False
            total = 0.0
            avail_c: list[int] = []
            avail_w: list[float] = []
            for c, w in zip(row_cols[i], row_weights[i]):
                if not used[c]:
                    avail_c.append(c)
                    avail_w.append(w)
                    total += w
            r = uniforms[step] * total
            step += 1
            acc = 0.0
            new = avail_c[-1]
            for c, w in zip(avail_c, avail_w):
                acc += w
                if r <= acc:
                    new = c
                    break
            cols[i] = new
            used[new] = True
            if new != cur:
                seen.add(tuple(cols))

    states = np.array(sorted(seen), dtype=int)
    costs = full[np.arange(ns), states].sum(axis=1)
    order = sorted(range(len(states)), key=lambda idx: (costs[idx], tuple(states[idx])))
    top = tuple(
        Assignment(columns=tuple(int(c) for c in states[idx]), cost=float(costs[idx]))
        for idx in order[: cfg.k]
    )
    return RankedSolution(assignments=top, requested_k=cfg.k)

"""Gated cost matrices, assignments, ranked solutions, and a brute-force oracle.

A problem instance is an |I| x (|Z|+|I|) cost matrix: a dense "detected" block
(track i vs measurement j, infinity where gating removed the pair) followed by
a diagonal "misdetected" block (column |Z|+i holds the finite misdetection cost
of track i and infinity elsewhere). An assignment maps every track to exactly
one column, no column used twice, referencing only finite entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    InfiniteEntry,
    InvalidEntry,
    NonFiniteMisdetect,
    OracleLimitExceeded,
    ShapeMismatch,
)

INF = float("inf")

# Absolute tolerance for cost comparisons (tie grouping, invariant checks).
COST_TOL = 1e-9

# Max rows the exponential enumeration oracle accepts.
ORACLE_LIMIT = 6


@dataclass(frozen=True)
class CostMatrix:
    """Validated association costs. Immutable; build via validate_cost_matrix."""

    num_tracks: int
    num_measurements: int
    detected: np.ndarray   # (|I|, |Z|), float64, +inf marks gated-out pairs
    misdetect: np.ndarray  # (|I|,), float64, always finite

    @property
    def num_columns(self) -> int:
        return self.num_measurements + self.num_tracks

    @cached_property
    def full(self) -> np.ndarray:
        """The |I| x (|Z|+|I|) matrix with the diagonal misdetected block."""
        ns, nz = self.num_tracks, self.num_measurements
        out = np.full((ns, nz + ns), INF)
        out[:, :nz] = self.detected
        out[np.arange(ns), nz + np.arange(ns)] = self.misdetect
        out.flags.writeable = False
        return out


@dataclass(frozen=True)
class Assignment:
    """One track-to-column map with its summed cost."""

    columns: tuple[int, ...]
    cost: float


@dataclass(frozen=True)
class RankedSolution:
    """Distinct valid assignments in non-decreasing cost order."""

    assignments: tuple[Assignment, ...]
    requested_k: int

    def __len__(self) -> int:
        return len(self.assignments)

    def __iter__(self):
        return iter(self.assignments)

    def __getitem__(self, i: int) -> Assignment:
        return self.assignments[i]

    def costs(self) -> list[float]:
        return [a.cost for a in self.assignments]


def validate_cost_matrix(num_tracks, num_measurements, detected, misdetect) -> CostMatrix:
    """Check shapes and entries, returning an immutable CostMatrix.

    Raises ShapeMismatch for size disagreements, NonFiniteMisdetect when any
    misdetection cost is inf/NaN, InvalidEntry for NaN in the detected block.
    """
    if num_tracks < 1:
        raise ShapeMismatch(f"num_tracks must be >= 1, got {num_tracks}")
    if num_measurements < 0:
        raise ShapeMismatch(f"num_measurements must be >= 0, got {num_measurements}")

    det = np.asarray(detected, dtype=float)
    if num_measurements == 0:
        det = det.reshape(num_tracks, 0) if det.size == 0 else det
    if det.shape != (num_tracks, num_measurements):
        raise ShapeMismatch(
            f"detected must be {num_tracks}x{num_measurements}, got {det.shape}"
        )

    mis = np.asarray(misdetect, dtype=float)
    if mis.shape != (num_tracks,):
        raise ShapeMismatch(f"misdetect must have length {num_tracks}, got {mis.shape}")
    if not np.all(np.isfinite(mis)):
        raise NonFiniteMisdetect("every misdetection cost must be finite")
    if np.any(np.isnan(det)):
        raise InvalidEntry("NaN is not a legal cost entry")

    det = det.copy()
    mis = mis.copy()
    det.flags.writeable = False
    mis.flags.writeable = False
    return CostMatrix(int(num_tracks), int(num_measurements), det, mis)


def assignment_cost(C: CostMatrix, columns) -> float:
    """Sum of the referenced entries of the full matrix (Frobenius inner product
    of the cost matrix with the 0/1 assignment matrix)."""
    cols = np.asarray(columns, dtype=int)
    if cols.shape != (C.num_tracks,):
        raise ShapeMismatch(f"columns must have length {C.num_tracks}")
    if np.any(cols < 0) or np.any(cols >= C.num_columns):
        raise ShapeMismatch("column index out of range")
    vals = C.full[np.arange(C.num_tracks), cols]
    if not np.all(np.isfinite(vals)):
        raise InfiniteEntry("assignment references a gated (infinite) entry")
    return float(vals.sum())


def is_valid_assignment(C: CostMatrix, columns) -> bool:
    """True iff columns are pairwise distinct and every referenced entry is finite."""
    cols = np.asarray(columns, dtype=int)
    if cols.shape != (C.num_tracks,):
        return False
    if np.any(cols < 0) or np.any(cols >= C.num_columns):
        return False
    if len(set(cols.tolist())) != C.num_tracks:
        return False
    return bool(np.all(np.isfinite(C.full[np.arange(C.num_tracks), cols])))


def enumerate_assignments(C: CostMatrix, k: int, limit: int = ORACLE_LIMIT) -> RankedSolution:
    """Brute-force oracle: every valid assignment, cost-sorted, truncated to k.

    Ties broken by lexicographically smallest column vector. Exponential in
    |I|, so refuses instances with more than `limit` rows.
    """
    if C.num_tracks > limit:
        raise OracleLimitExceeded(
            f"oracle limited to {limit} rows, instance has {C.num_tracks}"
        )
    if k < 1:
        raise ValueError("k must be >= 1")

    full = C.full
    finite_cols = [np.flatnonzero(np.isfinite(full[i])).tolist() for i in range(C.num_tracks)]

    found: list[tuple[float, tuple[int, ...]]] = []
    cols: list[int] = []
    used: set[int] = set()

    def recurse(i: int, cost: float) -> None:
        if i == C.num_tracks:
            found.append((cost, tuple(cols)))
            return
        for j in finite_cols[i]:
            if j not in used:
                used.add(j)
                cols.append(j)
                recurse(i + 1, cost + full[i, j])
                cols.pop()
                used.remove(j)

    recurse(0, 0.0)
    found.sort(key=lambda item: (item[0], item[1]))
    top = tuple(Assignment(columns=c, cost=float(cost)) for cost, c in found[:k])
    return RankedSolution(assignments=top, requested_k=k)


def all_misdetected(C: CostMatrix) -> Assignment:
    """The always-valid fallback assigning every track to its misdetection column."""
    cols = tuple(C.num_measurements + i for i in range(C.num_tracks))
    return Assignment(columns=cols, cost=float(C.misdetect.sum()))

"""Evaluation scores for ranked-assignment predictions.

All scores compare a predicted ranked solution against the optimal (exact
k-best) reference. Assignment equality is exact column-vector equality; cost
values never enter the position scores, only identity and rank do.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cost_model import RankedSolution

DEFAULT_RHO = 2

# Rank slots a method failed to fill are charged the worst reference cost
# plus this margin.
MISSING_COST_PENALTY = 0.1


@dataclass(frozen=True)
class EvalReport:
    """Per-instance scores for one method at one k."""

    per_rank_accuracy: tuple[float, ...]
    mean_cost: float
    wp: float
    k: int
    rho: int


def _columns(sol: RankedSolution, rank: int):
    """Column vector at 1-based rank, or None when absent."""
    if 1 <= rank <= len(sol):
        return sol[rank - 1].columns
    return None


def kappa(pred: RankedSolution, opt: RankedSolution, i: int, rho: int = DEFAULT_RHO) -> int:
    """Position agreement of prediction rank i against the reference.

    3: exact slot match. 2: the prediction sits within +-rho slots of i
    (window clipped to the list, slot i itself excluded). 1: it appears
    somewhere else in the reference list. 0: absent prediction or no match.
    """
    k = len(opt)
    p = _columns(pred, i)
    if p is None:
        return 0
    if p == _columns(opt, i):
        return 3
    for j in range(max(1, i - rho), min(k, i + rho) + 1):
        if j != i and p == _columns(opt, j):
            return 2
    for j in range(1, k + 1):
        if p == _columns(opt, j):
            return 1
    return 0


def wp_score(pred: RankedSolution, opt: RankedSolution, k: int | None = None,
             rho: int = DEFAULT_RHO) -> float:
    """Weighted-position score in [0, 3].

    Sum over ranks i of w_i * kappa_i with w_i = 2(k+1-i) / (k(k+1)); the
    weights sum to one and emphasize the first assignments. Equals 3 exactly
    iff every rank matches the reference slot-for-slot.
    """
    if k is None:
        k = len(opt)
    if k < 1:
        raise ValueError("k must be >= 1")
    # The kappa values are integers, so summing (k+1-i)*kappa_i exactly and
    # applying the common weight factor once keeps the perfect case at 3.0
    # without accumulation error.
    total = 0
    for i in range(1, k + 1):
        total += (k + 1 - i) * kappa(pred, opt, i, rho)
    return 2.0 * total / (k * (k + 1))


def rank_accuracy(pred: RankedSolution, opt: RankedSolution, k: int | None = None) -> list[int]:
    """Per-rank 0/1 indicators: 1 iff prediction rank i exactly matches reference rank i."""
    if k is None:
        k = len(opt)
    return [
        1 if (_columns(pred, i) is not None and _columns(pred, i) == _columns(opt, i)) else 0
        for i in range(1, k + 1)
    ]


def penalized_mean_cost(pred: RankedSolution, opt: RankedSolution, k: int | None = None) -> float:
    """Mean predicted cost over k slots, charging missing slots c_max + 0.1.

    c_max is the worst cost among the reference assignments, which keeps the
    penalty defined even for an empty prediction.
    """
    if len(opt) == 0:
        raise ValueError("reference solution must be nonempty")
    if k is None:
        k = len(opt)
    penalty = max(a.cost for a in opt) + MISSING_COST_PENALTY
    total = 0.0
    for i in range(1, k + 1):
        total += pred[i - 1].cost if i <= len(pred) else penalty
    return total / k


def evaluate_solution(pred: RankedSolution, opt: RankedSolution, k: int | None = None,
                      rho: int = DEFAULT_RHO) -> EvalReport:
    """Bundle all three scores for one instance."""
    if k is None:
        k = len(opt)
    return EvalReport(
        per_rank_accuracy=tuple(float(a) for a in rank_accuracy(pred, opt, k)),
        mean_cost=penalized_mean_cost(pred, opt, k),
        wp=wp_score(pred, opt, k, rho),
        k=k,
        rho=rho,
    )

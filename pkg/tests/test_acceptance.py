"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Run with `pytest tests/test_acceptance.py -v -s`.

These are the heavyweight checks (large seeded populations, convergence
budgets, timing trends); the per-module files cover the same ground at
commit-test sizes.
"""

import filecmp
import functools
import time

import numpy as np
import pytest

from rankassign import (
    GibbsConfig,
    PredictionMatrix,
    enumerate_assignments,
    gibbs_sample,
    greedy_post_process,
    is_valid_assignment,
    murty_k_best,
    penalized_mean_cost,
    rank_accuracy,
    to_bipartite,
    validate_cost_matrix,
    wp_score,
)
from rankassign.bench import time_modules
from rankassign.cost_model import Assignment, RankedSolution
from rankassign.datagen import GenConfig, generate_dataset, generate_instance, instance_seed
from rankassign.metrics import kappa

from conftest import seeded_instances
from test_postproc import one_hot_prediction


def criterion(name):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] {name}: FAIL")
                raise
            print(f"[acceptance] {name}: PASS")

        return run

    return wrap


@criterion("oracle equivalence (1000 instances, k=10, tol 1e-9, <60s)")
def test_oracle_equivalence():
    instances = seeded_instances(1000, nu_s_range=(1, 4), varthetas=(0.0, 0.3, 0.6),
                                 base_seed=2024)
    start = time.perf_counter()
    for C in instances:
        exact = murty_k_best(C, 10).costs()
        oracle = enumerate_assignments(C, 10).costs()
        assert len(exact) == len(oracle)
        for a, b in zip(exact, oracle):
            assert abs(a - b) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"oracle equivalence took {elapsed:.1f}s"


@criterion("exact reference scores wp=3.0 and accuracy=1.0")
def test_murty_reference_scores():
    for C in seeded_instances(200, nu_s_range=(1, 6), varthetas=(0.1, 0.4, 0.8),
                              base_seed=99):
        opt = murty_k_best(C, 10)
        assert wp_score(opt, opt) == 3.0
        assert rank_accuracy(opt, opt) == [1] * len(opt)


@criterion("Gibbs rank-1 optimality and output invariants")
def test_gibbs_rank1_and_invariants():
    for i, C in enumerate(seeded_instances(300, nu_s_range=(1, 6),
                                           varthetas=(0.0, 0.3, 0.6), base_seed=55)):
        sol = gibbs_sample(C, GibbsConfig(iterations=20, seed=i, k=10))
        opt = murty_k_best(C, min(10, len(sol)))
        assert rank_accuracy(sol, opt)[0] == 1
        columns = [a.columns for a in sol]
        assert len(set(columns)) == len(columns)
        costs = sol.costs()
        assert all(b >= a - 1e-9 for a, b in zip(costs, costs[1:]))
        for a in sol:
            assert is_valid_assignment(C, a.columns)


@criterion("Gibbs convergence: 10k sweeps match oracle top-k on >=99% of 500")
def test_gibbs_convergence():
    hits = 0
    total = 500
    for i, C in enumerate(seeded_instances(total, nu_s_range=(1, 4),
                                           varthetas=(0.0, 0.3, 0.6), base_seed=77)):
        sol = gibbs_sample(C, GibbsConfig(iterations=10_000, seed=10_000 + i, k=10))
        oracle = enumerate_assignments(C, 10)
        if {a.columns for a in sol} == {a.columns for a in oracle}:
            hits += 1
    assert hits >= 0.99 * total, f"only {hits}/{total} matched the oracle top-k"


@criterion("post-processing fixed point on 500 instances")
def test_postproc_fixed_point():
    for C in seeded_instances(500, nu_s_range=(1, 5), varthetas=(0.0, 0.3, 0.6),
                              base_seed=31):
        opt = murty_k_best(C, 10)
        result = greedy_post_process(one_hot_prediction(C, opt), C)
        assert [a.columns for a in result] == [a.columns for a in opt]
        assert result.costs() == pytest.approx(opt.costs(), abs=1e-9)


@criterion("greedy expansion example reproduced exactly")
def test_postproc_expansion_example():
    C = validate_cost_matrix(2, 1, [[1.0], [2.0]], [4.0, 3.0])
    pred = PredictionMatrix(
        values=np.array([[0.9], [0.6], [0.2], [0.8]]), graph=to_bipartite(C), k_max=1
    )
    result = greedy_post_process(pred, C, k_max=10)
    assert [a.columns for a in result] == [(0, 2), (1, 2)]
    assert result.costs() == [4.0, 7.0]


@criterion("post-processing never emits an invalid assignment (10k soft matrices)")
def test_postproc_validity_property():
    rng = np.random.default_rng(404)
    instances = seeded_instances(500, nu_s_range=(1, 5), varthetas=(0.0, 0.4, 0.7),
                                 base_seed=404)
    checked = 0
    for C in instances:
        G = to_bipartite(C)
        for _ in range(20):
            k_cols = int(rng.integers(1, 6))
            values = rng.random((len(G.edges), k_cols))
            pred = PredictionMatrix(values=values, graph=G, k_max=k_cols)
            result = greedy_post_process(pred, C)
            for a in result:
                assert is_valid_assignment(C, a.columns)
            checked += 1
    assert checked == 10_000


@criterion("metric unit values exact to 1e-12")
def test_metric_unit_values():
    opt = RankedSolution(
        assignments=(
            Assignment((0, 2), 4.0),
            Assignment((1, 0), 6.0),
            Assignment((1, 2), 7.0),
        ),
        requested_k=3,
    )
    assert abs(wp_score(opt, opt) - 3.0) <= 1e-12

    disjoint = RankedSolution(
        assignments=(Assignment((9, 8), 0.0), Assignment((8, 9), 0.0)), requested_k=2
    )
    assert abs(wp_score(disjoint, opt) - 0.0) <= 1e-12

    opt2 = RankedSolution(assignments=opt.assignments[:2], requested_k=2)
    swap = RankedSolution(assignments=(opt[1], opt[0]), requested_k=2)
    assert abs(wp_score(swap, opt2, k=2) - 2.0) <= 1e-12

    partial = RankedSolution(assignments=opt.assignments[:2], requested_k=3)
    assert abs(penalized_mean_cost(partial, opt, k=3) - 5.7) <= 1e-12
    assert kappa(swap, opt2, 1, rho=2) == 2


@criterion("generator statistics (Poisson mean, gating rate, reproducibility)")
def test_generator_statistics(tmp_path):
    ks = []
    for i in range(10_000):
        _, k = generate_instance(
            GenConfig(nu_s=3, vartheta=0.3, seed=instance_seed(7, 0, 3, i))
        )
        ks.append(k)
    mean_k = float(np.mean(ks))
    assert abs(mean_k - 4.0) <= 0.1, f"Poisson mean was {mean_k:.3f}"

    total = gated = 0
    i = 0
    while total < 10_000:
        C, _ = generate_instance(
            GenConfig(nu_s=4, vartheta=0.5, seed=instance_seed(8, 0, 4, i))
        )
        total += C.detected.size
        gated += int(np.isinf(C.detected).sum())
        i += 1
    rate = gated / total
    assert abs(rate - 0.5) <= 0.02, f"gating rate was {rate:.3f}"

    kwargs = dict(seed=2718, count=3, nu_s_values=(1, 2, 4), vartheta_values=(0.2, 0.6),
                  k_max=5)
    generate_dataset(tmp_path / "a", **kwargs)
    generate_dataset(tmp_path / "b", **kwargs)
    rels = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.json"))
    assert rels
    for rel in rels:
        assert filecmp.cmp(tmp_path / "a" / rel, tmp_path / "b" / rel, shallow=False), (
            f"regenerated file differs: {rel}"
        )


@criterion("timing harness: report shape and Murty growth trend over nu_s 1..15")
def test_timing_trend(tmp_path):
    manifest = generate_dataset(
        tmp_path / "timing",
        seed=1234,
        count=100,
        nu_s_values=tuple(range(1, 16)),
        vartheta_values=(0.3,),
        with_labels=False,
    )
    rows = time_modules(manifest, tmp_path / "timing", k=10, gibbs_iterations=20)
    assert [r["nu_s"] for r in rows] == list(range(1, 16))
    assert all(r["n"] >= 100 for r in rows)
    for r in rows:
        for col in ("graph_us", "postproc_us", "gibbs_us", "murty_us"):
            assert float(r[col]) > 0.0
    murty = [float(r["murty_us"]) for r in rows]
    # Growth trend on wall-clock medians: allow a small per-step noise band,
    # require strict growth across any three-size window and overall.
    for a, b in zip(murty, murty[1:]):
        assert b >= 0.9 * a, f"Murty median time regressed: {murty}"
    for a, b in zip(murty, murty[3:]):
        assert b > a, f"Murty median time not growing: {murty}"
    assert murty[-1] > 5.0 * murty[0], f"Murty growth too weak: {murty}"

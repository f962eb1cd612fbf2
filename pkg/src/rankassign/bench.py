"""Benchmark harness: per-instance evaluation, parameter sweeps, module timing.

Sweeps mirror the two evaluation designs: the k_max axis re-scores every
instance at each requested solution count, the nu_s axis buckets instances by
row count and keeps each instance's own Poisson-drawn k. The exact solver is
always run as the metric reference. Everything except wall times is
deterministic for a fixed seed.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fileio
from .cost_model import CostMatrix, RankedSolution
from .datagen import DEFAULT_K_MAX
from .errors import ManifestMismatch, MissingPredictions
from .exact import murty_k_best
from .gibbs import GibbsConfig, default_iterations, gibbs_sample
from .graphify import normalize_graph, to_bipartite
from .metrics import DEFAULT_RHO, evaluate_solution
from .postproc import DEFAULT_THETA_SIG, PredictionMatrix, greedy_post_process

METHODS = ("murty", "gibbs", "predictions-file")
SWEEP_AXES = ("k_max", "nu_s")

TIMING_COLUMNS = ["nu_s", "n", "graph_us", "postproc_us", "gibbs_us", "murty_us"]

# Ranks reported as fixed accuracy columns in results tables.
REPORTED_RANKS = 4


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    methods: tuple[str, ...]
    repetitions: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")
        if not self.values:
            raise ValueError("values must be nonempty")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def _now_us() -> float:
    return time.perf_counter_ns() / 1000.0


def _instance_gibbs_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def load_prediction_values(predictions, instance_id: str) -> np.ndarray:
    """Resolve one instance's soft scores from a file or a directory of files."""
    p = Path(predictions)
    if p.is_dir():
        p = p / f"{instance_id}.json"
    if not p.exists():
        raise MissingPredictions(f"no predictions found for instance {instance_id!r}")
    pred_id, values = fileio.read_predictions(p)
    if pred_id != instance_id:
        raise ManifestMismatch(
            f"prediction file {p} carries id {pred_id!r}, expected {instance_id!r}"
        )
    return values


def run_method(
    C: CostMatrix,
    method: str,
    k: int,
    opt: RankedSolution,
    gibbs_seed: int = 0,
    gibbs_iterations: int | None = None,
    prediction_values: np.ndarray | None = None,
    theta_sig: float = DEFAULT_THETA_SIG,
) -> tuple[RankedSolution, float]:
    """Produce one method's ranked solution and its wall time in microseconds."""
    if method == "murty":
        t0 = _now_us()
        sol = murty_k_best(C, k)
        return sol, _now_us() - t0
    if method == "gibbs":
        iters = gibbs_iterations or default_iterations(C.num_tracks)
        cfg = GibbsConfig(iterations=iters, seed=gibbs_seed, k=k)
        t0 = _now_us()
        sol = gibbs_sample(C, cfg)
        return sol, _now_us() - t0
    if method == "predictions-file":
        if prediction_values is None:
            raise MissingPredictions("predictions-file method needs prediction values")
        t0 = _now_us()
        graph = to_bipartite(C)
        pred = PredictionMatrix(
            values=prediction_values, graph=graph, k_max=prediction_values.shape[1]
        )
        sol = greedy_post_process(pred, C, theta_sig)
        return sol, _now_us() - t0
    raise ValueError(f"unknown method {method!r}")


def evaluate_instance(
    C: CostMatrix,
    instance_id: str,
    methods,
    k: int,
    rho: int = DEFAULT_RHO,
    repetitions: int = 1,
    gibbs_seed: int = 0,
    gibbs_iterations: int | None = None,
    prediction_values: np.ndarray | None = None,
    theta_sig: float = DEFAULT_THETA_SIG,
) -> list[dict]:
    """Results-CSV rows for one instance, one per method.

    The exact solver defines the reference ranking; when the instance admits
    fewer assignments than k, scoring shrinks to the available count so every
    rank column stays well-defined.
    """
    opt = murty_k_best(C, k)
    k_eval = min(k, len(opt))
    rows = []
    for method in methods:
        times = []
        sol = None
        for _ in range(repetitions):
            sol, elapsed = run_method(
                C,
                method,
                k,
                opt,
                gibbs_seed=gibbs_seed,
                gibbs_iterations=gibbs_iterations,
                prediction_values=prediction_values,
                theta_sig=theta_sig,
            )
            times.append(elapsed)
        report = evaluate_solution(sol, opt, k=k_eval, rho=rho)
        row = {
            "instance_id": instance_id,
            "method": method,
            "k": k_eval,
            "wp": f"{report.wp:.6f}",
            "mean_cost": f"{report.mean_cost:.6f}",
            "wall_time_us": f"{statistics.median(times):.1f}",
        }
        for r in range(1, REPORTED_RANKS + 1):
            row[f"acc_{r}"] = (
                f"{report.per_rank_accuracy[r - 1]:.0f}" if r <= k_eval else ""
            )
        row["_acc_full"] = report.per_rank_accuracy
        rows.append(row)
    return rows


def _sweep_task(args) -> list[dict]:
    (root, inst, index, cell_value, methods, k, rho, repetitions, seed,
     gibbs_iterations, predictions, theta_sig) = args
    C, _ = fileio.read_instance(Path(root) / inst["path"])
    pred_values = None
    if "predictions-file" in methods:
        pred_values = load_prediction_values(predictions, inst["id"])
    rows = evaluate_instance(
        C,
        inst["id"],
        methods,
        k,
        rho=rho,
        repetitions=repetitions,
        gibbs_seed=_instance_gibbs_seed(seed, index),
        gibbs_iterations=gibbs_iterations,
        prediction_values=pred_values,
        theta_sig=theta_sig,
    )
    for row in rows:
        row["_cell"] = cell_value
    return rows


def run_sweep(
    spec: SweepSpec,
    manifest: dict,
    root,
    predictions=None,
    gibbs_iterations: int | None = None,
    theta_sig: float = DEFAULT_THETA_SIG,
    rho: int = DEFAULT_RHO,
    jobs: int = 1,
) -> tuple[list[dict], list[dict]]:
    """Run one sweep; returns (per-instance rows, per-cell summary rows)."""
    if "predictions-file" in spec.methods and predictions is None:
        raise MissingPredictions("sweep over predictions-file needs --predictions")

    tasks = []
    if spec.axis == "k_max":
        for value in spec.values:
            for index, inst in enumerate(manifest["instances"]):
                tasks.append((root, inst, index, value, spec.methods, int(value),
                              rho, spec.repetitions, spec.seed, gibbs_iterations,
                              predictions, theta_sig))
    else:
        by_cell = {int(v): [] for v in spec.values}
        for index, inst in enumerate(manifest["instances"]):
            if int(inst["nu_s"]) in by_cell:
                by_cell[int(inst["nu_s"])].append((index, inst))
        for value, members in by_cell.items():
            for index, inst in members:
                tasks.append((root, inst, index, value, spec.methods,
                              int(inst["requested_k"]), rho, spec.repetitions,
                              spec.seed, gibbs_iterations, predictions, theta_sig))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_task = list(pool.map(_sweep_task, tasks, chunksize=8))
    else:
        per_task = [_sweep_task(t) for t in tasks]

    rows = [row for batch in per_task for row in batch]
    return rows, summarize_rows(rows, spec.axis)


def summarize_rows(rows: list[dict], axis: str) -> list[dict]:
    """Aggregate per-instance rows into per-(cell, method) means.

    Rank-i accuracy is averaged only over instances whose evaluation depth
    reaches rank i; the contributing count is reported next to each mean.
    """
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["_cell"], row["method"]), []).append(row)

    summary = []
    for (cell, method), members in sorted(groups.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        out = {
            axis: cell,
            "method": method,
            "n": len(members),
            "wp_mean": f"{statistics.mean(float(m['wp']) for m in members):.6f}",
            "cost_mean": f"{statistics.mean(float(m['mean_cost']) for m in members):.6f}",
            "time_us_mean": f"{statistics.mean(float(m['wall_time_us']) for m in members):.1f}",
        }
        for r in range(1, REPORTED_RANKS + 1):
            vals = [m["_acc_full"][r - 1] for m in members if len(m["_acc_full"]) >= r]
            out[f"acc_{r}_mean"] = f"{statistics.mean(vals):.6f}" if vals else ""
            out[f"acc_{r}_n"] = len(vals)
        summary.append(out)
    return summary


def summary_columns(axis: str) -> list[str]:
    return (
        [axis, "method", "n", "wp_mean", "cost_mean"]
        + [c for r in range(1, REPORTED_RANKS + 1) for c in (f"acc_{r}_mean", f"acc_{r}_n")]
        + ["time_us_mean"]
    )


def hardware_description() -> list[str]:
    import platform

    cpu = platform.processor() or platform.machine()
    try:
        with open("/proc/cpuinfo", encoding="utf-8") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    cpu = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    return [
        f"cpu: {cpu}",
        f"platform: {platform.platform()}",
        f"python: {platform.python_version()}, numpy: {np.__version__}",
    ]


def time_modules(
    manifest: dict,
    root,
    k: int = DEFAULT_K_MAX,
    gibbs_iterations: int | None = None,
    theta_sig: float = DEFAULT_THETA_SIG,
    prediction_seed: int = 0,
) -> list[dict]:
    """Median per-instance wall time (microseconds) of each module per nu_s bucket.

    Buckets are interleaved at instance granularity: measuring all of one
    bucket back-to-back would let a slow scheduler phase bias that bucket's
    entire median, while round-robin order spreads machine noise evenly.
    Post-processing is timed on seeded uniform-random score matrices so the
    measurement does not depend on a learned predictor being installed.
    Absolute numbers are hardware-dependent and are reported, never asserted.
    """
    buckets: dict[int, list[dict]] = {}
    for inst in manifest["instances"]:
        buckets.setdefault(int(inst["nu_s"]), []).append(inst)

    order = sorted(buckets)
    times: dict[int, dict[str, list[float]]] = {
        nu_s: {"graph": [], "post": [], "gibbs": [], "murty": []} for nu_s in order
    }
    rounds = max(len(members) for members in buckets.values())
    for index in range(rounds):
        for nu_s in order:
            members = buckets[nu_s]
            if index >= len(members):
                continue
            C, _ = fileio.read_instance(Path(root) / members[index]["path"])

            t0 = _now_us()
            graph = normalize_graph(to_bipartite(C))
            times[nu_s]["graph"].append(_now_us() - t0)

            rng = np.random.default_rng(
                np.random.SeedSequence([prediction_seed, nu_s, index])
            )
            values = rng.random((len(graph.edges), k))
            pred = PredictionMatrix(values=values, graph=graph, k_max=k)
            t0 = _now_us()
            greedy_post_process(pred, C, theta_sig)
            times[nu_s]["post"].append(_now_us() - t0)

            iters = gibbs_iterations or default_iterations(C.num_tracks)
            cfg = GibbsConfig(iterations=iters, seed=_instance_gibbs_seed(prediction_seed, index), k=k)
            t0 = _now_us()
            gibbs_sample(C, cfg)
            times[nu_s]["gibbs"].append(_now_us() - t0)

            t0 = _now_us()
            murty_k_best(C, k)
            times[nu_s]["murty"].append(_now_us() - t0)

    return [
        {
            "nu_s": nu_s,
            "n": len(buckets[nu_s]),
            "graph_us": f"{statistics.median(times[nu_s]['graph']):.1f}",
            "postproc_us": f"{statistics.median(times[nu_s]['post']):.1f}",
            "gibbs_us": f"{statistics.median(times[nu_s]['gibbs']):.1f}",
            "murty_us": f"{statistics.median(times[nu_s]['murty']):.1f}",
        }
        for nu_s in order
    ]

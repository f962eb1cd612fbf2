"""Command-line harness.

Subcommands: generate, export-graphs, solve, sample, postprocess, evaluate,
sweep, time. All failures exit nonzero after printing one machine-readable
JSON error line to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, datagen, fileio
from .errors import RankAssignError
from .exact import murty_k_best
from .gibbs import GibbsConfig, default_iterations, gibbs_sample
from .graphify import normalize_graph, to_bipartite
from .postproc import DEFAULT_THETA_SIG, PredictionMatrix, greedy_post_process


def _add_generate(sub):
    p = sub.add_parser("generate", help="write a synthetic labeled dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, required=True, help="instances per sweep cell")
    p.add_argument("--nu-s-min", type=int, default=1)
    p.add_argument("--nu-s-max", type=int, default=15)
    p.add_argument("--vartheta-steps", type=int, default=9,
                   help="use gating probabilities 0.1 .. 0.1*steps")
    p.add_argument("--vartheta", type=float, nargs="+", default=None,
                   help="explicit gating probabilities (overrides --vartheta-steps)")
    p.add_argument("--k-max", type=int, default=datagen.DEFAULT_K_MAX)
    p.add_argument("--no-labels", action="store_true")


def _cmd_generate(args) -> int:
    varthetas = args.vartheta
    if varthetas is None:
        varthetas = [round(0.1 * s, 1) for s in range(1, args.vartheta_steps + 1)]
    manifest = datagen.generate_dataset(
        args.out,
        seed=args.seed,
        count=args.count,
        nu_s_values=tuple(range(args.nu_s_min, args.nu_s_max + 1)),
        vartheta_values=tuple(varthetas),
        k_max=args.k_max,
        with_labels=not args.no_labels,
    )
    print(f"wrote {len(manifest['instances'])} instances to {args.out}")
    return 0


def _add_export_graphs(sub):
    p = sub.add_parser("export-graphs", help="convert instances to bipartite graph files")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--normalize", action="store_true",
                   help="min-max scale features and attrs into [0,1]")


def _cmd_export_graphs(args) -> int:
    manifest = fileio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    out = fileio.ensure_dir(args.out)
    for inst in manifest["instances"]:
        C, _ = fileio.read_instance(root / inst["path"])
        graph = to_bipartite(C)
        if args.normalize:
            graph = normalize_graph(graph)
        fileio.write_graph(out / f"{inst['id']}.json", inst["id"], graph)
    print(f"wrote {len(manifest['instances'])} graphs to {args.out}")
    return 0


def _add_solve(sub):
    p = sub.add_parser("solve", help="exact k-best assignments for one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--algorithm", choices=["murty"], default="murty")
    p.add_argument("--out", default=None)


def _cmd_solve(args) -> int:
    C, _ = fileio.read_instance(args.instance)
    sol = murty_k_best(C, args.k)
    _emit_solution(args.out, Path(args.instance).stem, args.algorithm, sol)
    return 0


def _add_sample(sub):
    p = sub.add_parser("sample", help="Gibbs-sampled k-best assignments for one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--iterations", type=int, default=None,
                   help="full sweeps (default: 100 per row)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)


def _cmd_sample(args) -> int:
    C, _ = fileio.read_instance(args.instance)
    iters = args.iterations or default_iterations(C.num_tracks)
    sol = gibbs_sample(C, GibbsConfig(iterations=iters, seed=args.seed, k=args.k))
    _emit_solution(args.out, Path(args.instance).stem, "gibbs", sol)
    return 0


def _emit_solution(out, sol_id, method, sol) -> None:
    if out:
        fileio.write_solution(out, sol_id, method, sol)
    else:
        payload = {
            "id": sol_id,
            "method": method,
            "assignments": [
                {"columns": list(a.columns), "cost": a.cost} for a in sol
            ],
        }
        print(json.dumps(payload))


def _add_postprocess(sub):
    p = sub.add_parser("postprocess", help="decode soft predictions into ranked assignments")
    p.add_argument("--predictions", required=True, help="prediction file or directory")
    p.add_argument("--instances", required=True, help="instance file or dataset manifest")
    p.add_argument("--theta", type=float, default=DEFAULT_THETA_SIG)
    p.add_argument("--out", default=None, help="output directory (default: print)")


def _iter_instances(instances_arg):
    """Yield (id, CostMatrix) from a single instance file or a manifest."""
    path = Path(instances_arg)
    data = json.loads(path.read_text(encoding="utf-8"))
    if "instances" in data:
        manifest = fileio.read_manifest(path)
        root = path.parent
        for inst in manifest["instances"]:
            C, _ = fileio.read_instance(root / inst["path"])
            yield inst["id"], C
    else:
        C, _ = fileio.read_instance(path)
        yield path.stem, C


def _cmd_postprocess(args) -> int:
    out_dir = fileio.ensure_dir(args.out) if args.out else None
    count = 0
    for inst_id, C in _iter_instances(args.instances):
        values = bench.load_prediction_values(args.predictions, inst_id)
        graph = to_bipartite(C)
        pred = PredictionMatrix(values=values, graph=graph, k_max=values.shape[1])
        sol = greedy_post_process(pred, C, args.theta)
        if out_dir:
            fileio.write_solution(out_dir / f"{inst_id}.json", inst_id, "postprocess", sol)
        else:
            _emit_solution(None, inst_id, "postprocess", sol)
        count += 1
    if out_dir:
        print(f"wrote {count} solution files to {args.out}")
    return 0


def _add_evaluate(sub):
    p = sub.add_parser("evaluate", help="score a predictions file against the exact reference")
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", required=True, help="results CSV path")
    p.add_argument("--k", type=int, default=None,
                   help="override the per-instance requested k")
    p.add_argument("--theta", type=float, default=DEFAULT_THETA_SIG)
    p.add_argument("--rho", type=int, default=2)


def _cmd_evaluate(args) -> int:
    manifest = fileio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    rows = []
    for inst in manifest["instances"]:
        C, _ = fileio.read_instance(root / inst["path"])
        values = bench.load_prediction_values(args.predictions, inst["id"])
        k = args.k or int(inst["requested_k"])
        rows.extend(
            bench.evaluate_instance(
                C,
                inst["id"],
                ["predictions-file"],
                k,
                rho=args.rho,
                prediction_values=values,
                theta_sig=args.theta,
            )
        )
    fileio.write_results_csv(args.out, rows)
    print(f"wrote {len(rows)} result rows to {args.out}")
    return 0


def _add_sweep(sub):
    p = sub.add_parser("sweep", help="evaluate methods over a k_max or nu_s sweep")
    p.add_argument("--manifest", required=True)
    p.add_argument("--axis", choices=list(bench.SWEEP_AXES), required=True)
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.add_argument("--methods", required=True,
                   help=f"comma-separated subset of {','.join(bench.METHODS)}")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--predictions", default=None)
    p.add_argument("--iterations", type=int, default=None, help="Gibbs sweeps override")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--theta", type=float, default=DEFAULT_THETA_SIG)
    p.add_argument("--rho", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--verbose", action="store_true",
                   help="also write per-rank accuracies beyond rank 4")


def _cmd_sweep(args) -> int:
    manifest = fileio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    spec = bench.SweepSpec(
        axis=args.axis,
        values=tuple(int(v) for v in args.values.split(",")),
        methods=tuple(args.methods.split(",")),
        repetitions=args.repetitions,
        seed=args.seed,
    )
    rows, summary = bench.run_sweep(
        spec,
        manifest,
        root,
        predictions=args.predictions,
        gibbs_iterations=args.iterations,
        theta_sig=args.theta,
        rho=args.rho,
        jobs=args.jobs,
    )
    out = fileio.ensure_dir(args.out)
    fileio.write_results_csv(out / "results.csv", rows)
    fileio.write_table_csv(out / "summary.csv", bench.summary_columns(args.axis), summary)
    if args.verbose:
        rank_rows = [
            {"instance_id": r["instance_id"], "method": r["method"], "cell": r["_cell"],
             "rank": i + 1, "accuracy": int(acc)}
            for r in rows
            for i, acc in enumerate(r["_acc_full"])
        ]
        fileio.write_table_csv(
            out / "results_ranks.csv",
            ["instance_id", "method", "cell", "rank", "accuracy"],
            rank_rows,
        )
    print(f"wrote sweep results to {args.out}")
    return 0


def _add_time(sub):
    p = sub.add_parser("time", help="median module wall times per nu_s bucket")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=datagen.DEFAULT_K_MAX)
    p.add_argument("--iterations", type=int, default=None, help="Gibbs sweeps override")
    p.add_argument("--seed", type=int, default=0)


def _cmd_time(args) -> int:
    manifest = fileio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    rows = bench.time_modules(
        manifest,
        root,
        k=args.k,
        gibbs_iterations=args.iterations,
        prediction_seed=args.seed,
    )
    fileio.write_table_csv(
        args.out, bench.TIMING_COLUMNS, rows, header_comments=bench.hardware_description()
    )
    print(f"wrote timing table to {args.out}")
    return 0


COMMANDS = {
    "generate": _cmd_generate,
    "export-graphs": _cmd_export_graphs,
    "solve": _cmd_solve,
    "sample": _cmd_sample,
    "postprocess": _cmd_postprocess,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "time": _cmd_time,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankassign",
        description="Ranked-assignment solvers and benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_generate(sub)
    _add_export_graphs(sub)
    _add_solve(sub)
    _add_sample(sub)
    _add_postprocess(sub)
    _add_evaluate(sub)
    _add_sweep(sub)
    _add_time(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (RankAssignError, OSError, ValueError, KeyError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: solve, baseline, tune, plot, report.

Exit codes: 0 success, 2 parse/validation problem, 3 I/O problem.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .coarsening import CoarseningParams
from .graph import Graph
from .inflation import InflationError
from .instances import (DocumentError, InstanceError, build_solution_document,
                        load_instance, read_solution, trial_row, write_solution,
                        write_trials_csv)
from .plotting import render_solution_svg
from .report import build_report, format_report, write_report_csv
from .tuning import (SearchSpace, random_search, run_baseline, run_pipeline,
                     sample_params, solve_baseline, trial_seed)


def _summary_line(tag: str, metrics, score: float) -> str:
    return (f"{tag}: distance={metrics.total_distance:.2f} vehicles={metrics.num_vehicles} "
            f"duration={metrics.total_duration:.2f} tw={metrics.tw_violations} "
            f"cap={metrics.capacity_violations} feasible={metrics.feasible} "
            f"score={score:.2f}")


def _default_out(instance_path: str, suffix: str) -> Path:
    return Path(Path(instance_path).stem + suffix)


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    params = CoarseningParams(alpha=args.alpha, beta=args.beta, p_target=args.p,
                              radius_coeff=args.radius, propagation=args.propagation)
    out = run_pipeline(instance, params, args.solver)
    print(_summary_line(instance.name, out.metrics, out.score))
    doc = build_solution_document(
        out.solution, Graph.from_instance(instance), out.metrics,
        {"alpha": args.alpha, "beta": args.beta, "p": args.p,
         "radius_coeff": args.radius, "propagation": args.propagation,
         "solver": args.solver},
        seed=args.seed, timings=out.timings)
    out_path = args.out or _default_out(args.instance, ".solution.json")
    write_solution(doc, out_path)
    print(f"wrote {out_path}")
    return 0


def cmd_baseline(args) -> int:
    instance = load_instance(args.instance)
    solution, metrics, score, timings = solve_baseline(instance, args.solver)
    print(_summary_line(f"{instance.name} [baseline {args.solver}]", metrics, score))
    doc = build_solution_document(solution, Graph.from_instance(instance), metrics,
                                  {"solver": args.solver}, seed=args.seed,
                                  timings=timings)
    out_path = args.out or _default_out(args.instance, ".baseline.json")
    write_solution(doc, out_path)
    print(f"wrote {out_path}")
    return 0


def _space_from(args) -> SearchSpace:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise DocumentError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise DocumentError("config must be a JSON object")
    space = SearchSpace()
    fields = {"alphas": float, "betas": float, "ps": float,
              "radius_coeffs": float, "solvers": str}
    values = {}
    for name, cast in fields.items():
        if getattr(args, name, None):          # CLI flag wins
            values[name] = tuple(cast(v) for v in getattr(args, name).split(","))
        elif name in cfg:
            values[name] = tuple(cast(v) for v in cfg[name])
        else:
            values[name] = getattr(space, name)
    return SearchSpace(**values)


def cmd_tune(args) -> int:
    instance = load_instance(args.instance)
    space = _space_from(args)
    for solver in space.solvers:
        if solver not in ("greedy", "savings"):
            raise DocumentError(f"unknown solver in search space: {solver!r}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    best, trials = random_search(instance, space, args.trials, args.seed,
                                 propagation=args.propagation, jobs=args.jobs)
    baselines = [run_baseline(instance, s) for s in ("greedy", "savings")]
    write_trials_csv(out_dir / "trials.csv",
                     [trial_row(t, instance.name, args.seed) for t in trials])
    write_trials_csv(out_dir / "baselines.csv",
                     [trial_row(b, instance.name, args.seed) for b in baselines])
    # re-run the winning configuration to get its full solution for the document
    rng = random.Random(trial_seed(args.seed, best.trial))
    params, solver = sample_params(space, rng, args.propagation)
    out = run_pipeline(instance, params, solver)
    doc = build_solution_document(out.solution, Graph.from_instance(instance),
                                  out.metrics, best.params_doc(), seed=args.seed,
                                  timings=out.timings)
    write_solution(doc, out_dir / "best_solution.json")
    for b in baselines:
        print(_summary_line(f"{instance.name} [baseline {b.solver}]", b.metrics, b.score))
    print(_summary_line(
        f"{instance.name} [best trial {best.trial}: alpha={best.alpha} beta={best.beta} "
        f"p={best.p} radius={best.radius_coeff} solver={best.solver}]",
        best.metrics, best.score))
    print(f"wrote {out_dir / 'trials.csv'}, {out_dir / 'baselines.csv'}, "
          f"{out_dir / 'best_solution.json'}")
    return 0


def cmd_plot(args) -> int:
    doc = read_solution(args.solution)
    svg = render_solution_svg(doc)
    out_path = args.out or Path(Path(args.solution).stem + ".svg")
    Path(out_path).write_text(svg)
    print(f"wrote {out_path}")
    return 0


def cmd_report(args) -> int:
    rows = build_report(args.run_dirs)
    print(format_report(rows))
    if args.out:
        write_report_csv(args.out, rows)
        print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coarsevrp",
                                     description="Coarsen-solve-inflate toolkit for CVRPTW.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance(p):
        p.add_argument("instance", help="Solomon-format instance file")

    p = sub.add_parser("solve", help="coarsen, solve, inflate one instance")
    add_instance(p)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--solver", choices=("greedy", "savings"), default="savings")
    p.add_argument("--propagation", choices=("relaxed", "conservative"), default="relaxed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help="solution document path")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("baseline", help="solve the uncoarsened instance")
    add_instance(p)
    p.add_argument("--solver", choices=("greedy", "savings"), default="savings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help="solution document path")
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("tune", help="seeded random search over coarsening parameters")
    add_instance(p)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--propagation", choices=("relaxed", "conservative"), default="relaxed")
    p.add_argument("--config", help="JSON file with the search space")
    p.add_argument("--alphas", help="comma-separated override")
    p.add_argument("--betas", help="comma-separated override")
    p.add_argument("--ps", help="comma-separated override")
    p.add_argument("--radius-coeffs", dest="radius_coeffs", help="comma-separated override")
    p.add_argument("--solvers", help="comma-separated override")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_tune)

    p = sub.add_parser("plot", help="render a solution document to SVG")
    p.add_argument("solution", help="solution document (JSON)")
    p.add_argument("-o", "--out", help="SVG path")
    p.set_defaults(fn=cmd_plot)

    p = sub.add_parser("report", help="aggregate tuning runs into a comparison table")
    p.add_argument("run_dirs", nargs="+", help="directories written by `tune`")
    p.add_argument("-o", "--out", help="also write the table as CSV")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InstanceError, DocumentError, InflationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())

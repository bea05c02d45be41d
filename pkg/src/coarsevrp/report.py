"""Aggregate tuning runs into best-vs-baseline comparison tables."""

from __future__ import annotations

import csv
from pathlib import Path

from .instances import read_trials_csv

# Externally reported improvement percentages (distance, duration, vehicles)
# for the savings solver on the classic benchmark instances, used purely for
# side-by-side inspection in report output.
REFERENCE_IMPROVEMENTS = {
    "C101": (63.29, 54.72, 66.30),
    "C103": (63.72, 52.33, 69.57),
    "C201": (61.93, 63.92, 67.39),
    "C203": (64.20, 67.17, 70.65),
    "R101": (53.84, 57.92, 59.78),
    "R103": (56.17, 61.03, 64.13),
    "RC101": (61.73, 67.13, 67.39),
    "RC103": (64.17, 68.90, 69.57),
}

REPORT_FIELDS = [
    "instance", "solver",
    "baseline_distance", "best_distance", "distance_impr_pct",
    "baseline_duration", "best_duration", "duration_impr_pct",
    "baseline_vehicles", "best_vehicles", "vehicles_impr_pct",
    "baseline_tw", "best_tw",
    "ref_distance_impr_pct", "ref_duration_impr_pct", "ref_vehicles_impr_pct",
]


def improvement(base: float, new: float):
    """Percent reduction vs a baseline; None when the baseline is zero but got worse."""
    if base > 0:
        return (base - new) / base * 100.0
    return 0.0 if new <= base else None


def _f(row, key):
    return float(row[key])


def best_trial_row(trials: list[dict]) -> dict:
    """Lowest score wins; ties go to the earlier trial (mirrors the search)."""
    return min(trials, key=lambda r: (float(r["score"]), int(r["trial"])))


def load_run(run_dir: str | Path) -> tuple[list[dict], list[dict]]:
    run_dir = Path(run_dir)
    trials = read_trials_csv(run_dir / "trials.csv")
    baselines = read_trials_csv(run_dir / "baselines.csv")
    if not trials or not baselines:
        raise ValueError(f"{run_dir}: empty trials or baselines CSV")
    return trials, baselines


def reference_row(instance_name: str):
    """Reference percentages for the instance; synthetic twins match their namesake."""
    key = instance_name
    if key.startswith("synth_"):
        key = key[len("synth_"):]
    return REFERENCE_IMPROVEMENTS.get(key)


def build_report(run_dirs) -> list[dict]:
    """One row per (instance, baseline solver): best trial with that solver
    against that solver's baseline, plus reference percentages when known."""
    rows = []
    for run_dir in run_dirs:
        trials, baselines = load_run(run_dir)
        instance = trials[0]["instance"]
        ref = reference_row(instance)
        for base in sorted(baselines, key=lambda r: r["solver"]):
            solver = base["solver"]
            with_solver = [t for t in trials if t["solver"] == solver]
            if not with_solver:
                continue
            best = best_trial_row(with_solver)
            row = {
                "instance": instance, "solver": solver,
                "baseline_distance": _f(base, "total_distance"),
                "best_distance": _f(best, "total_distance"),
                "distance_impr_pct": improvement(_f(base, "total_distance"),
                                                 _f(best, "total_distance")),
                "baseline_duration": _f(base, "total_duration"),
                "best_duration": _f(best, "total_duration"),
                "duration_impr_pct": improvement(_f(base, "total_duration"),
                                                 _f(best, "total_duration")),
                "baseline_vehicles": int(_f(base, "num_vehicles")),
                "best_vehicles": int(_f(best, "num_vehicles")),
                "vehicles_impr_pct": improvement(_f(base, "num_vehicles"),
                                                 _f(best, "num_vehicles")),
                "baseline_tw": int(_f(base, "tw_violations")),
                "best_tw": int(_f(best, "tw_violations")),
                "ref_distance_impr_pct": ref[0] if ref else None,
                "ref_duration_impr_pct": ref[1] if ref else None,
                "ref_vehicles_impr_pct": ref[2] if ref else None,
            }
            rows.append(row)
    return rows


def _fmt(v):
    if v is None:
        return "—"
    if isinstance(v, float):
        return f"{v:.2f}"
    return str(v)


def format_report(rows: list[dict]) -> str:
    """Aligned text table: achieved improvements next to the reference ones."""
    headers = ["instance", "solver", "base dist", "best dist", "dist%",
               "base dur", "best dur", "dur%", "base veh", "best veh", "veh%",
               "base tw", "best tw", "ref dist%", "ref dur%", "ref veh%"]
    table = [headers]
    for r in rows:
        table.append([_fmt(r[k]) for k in REPORT_FIELDS])
    widths = [max(len(row[c]) for row in table) for c in range(len(headers))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def write_report_csv(path: str | Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_FIELDS)
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if r[k] is None else r[k]) for k in REPORT_FIELDS})

#!/usr/bin/env python3
"""Monte-Carlo outage/length study across planners on the standard setup.

Re-draws station placements per trial and prints the aggregate table: the
graph planners hold outage at zero by construction, the straight line does
not; the grid baseline trades wall time for unconstrained geometry.
"""

import argparse
from pathlib import Path

from skypath.evaluation import (
    MonteCarloConfig,
    run_monte_carlo,
    summarize_reports,
    write_report_csv,
    write_summary_json,
)
from skypath.scenario import build_default_scenario


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--base-seed", type=int, default=100)
    parser.add_argument("--seed", type=int, default=1, help="city seed")
    parser.add_argument("--with-grid", action="store_true",
                        help="include the lattice baseline (slower)")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out-dir", type=Path, default=None)
    args = parser.parse_args()

    planners = ("straight", "base", "optimized") + (("grid",) if args.with_grid else ())
    scenario = build_default_scenario(seed=args.seed, k=25)
    config = MonteCarloConfig(
        trials=args.trials, base_seed=args.base_seed, planners=planners, jobs=args.jobs
    )
    rows = run_monte_carlo(scenario, config)
    summary = summarize_reports(rows)

    print(f"{'planner':<12}{'feasible':>9}{'mean len':>10}{'mean outage':>12}"
          f"{'max outage':>11}{'wall (ms)':>11}")
    for name, entry in summary["planners"].items():
        mean_len = entry.get("mean_length_m", float("nan"))
        mean_out = entry.get("mean_outage", float("nan"))
        max_out = entry.get("max_outage", float("nan"))
        print(f"{name:<12}{entry['feasible']:>6}/{entry['trials']:<3}"
              f"{mean_len:>9.1f}{mean_out:>12.4f}{max_out:>11.4f}"
              f"{entry['mean_wall_ms']:>11.1f}")

    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        write_report_csv(rows, args.out_dir / "montecarlo.csv")
        write_summary_json(summary, args.out_dir / "summary.json")
        print(f"\nreports written to {args.out_dir}")


if __name__ == "__main__":
    main()

"""Trajectory scoring (length, outage) and the seeded Monte-Carlo harness."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coverage import ANGULAR_STEP, BORDER_SAMPLES, build_all_coverage, network_covered
from .planner import (
    GRID_STEP,
    InfeasibleEndpointError,
    Trajectory,
    base_trajectory,
    build_feasibility_graph,
    build_refined_graph,
    grid_baseline_plan,
    optimize_trajectory,
    straight_line_plan,
)
from .scenario import Scenario, place_base_stations

OUTAGE_STEP = 1.0

PLANNER_ORDER = ("straight", "base", "optimized", "grid")
DEFAULT_PLANNERS = ("straight", "base", "optimized")

CSV_COLUMNS = ("seed", "planner", "length_m", "outage", "nodes", "edges", "wall_ms")


def trajectory_length(t: Trajectory) -> float:
    """Total length: sum of consecutive waypoint distances."""
    return t.length


def sample_polyline(points_xy: np.ndarray, step: float) -> np.ndarray:
    """Arc-length samples of a polyline at the given spacing plus the endpoint."""
    pts = np.asarray(points_xy, dtype=float)
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = cum[-1]
    if total <= 0.0:
        return pts[:1]
    s = np.arange(0.0, total, step)
    if total - s[-1] > 1e-9:
        s = np.append(s, total)
    x = np.interp(s, cum, pts[:, 0])
    y = np.interp(s, cum, pts[:, 1])
    return np.column_stack([x, y])


def outage_fraction(t: Trajectory, scenario: Scenario, step: float = OUTAGE_STEP) -> float:
    """Fraction of arc-length samples where no station meets the SNR threshold.

    At constant speed the arc-length fraction equals the time fraction.
    """
    if step <= 0.0:
        raise ValueError(f"sampling step must be positive: {step}")
    samples = sample_polyline(t.xy_array(), step)
    covered = network_covered(samples, scenario)
    return float(1.0 - covered.mean())


@dataclass
class PlannerReport:
    """One planner's outcome on one scenario draw."""

    seed: int
    planner: str
    feasible: bool
    length_m: float | None
    outage: float | None
    nodes: int | None
    edges: int | None
    wall_ms: float
    note: str = ""


@dataclass
class MonteCarloConfig:
    trials: int
    base_seed: int = 0
    planners: tuple[str, ...] = DEFAULT_PLANNERS
    border_samples: int = BORDER_SAMPLES
    angular_step: float = ANGULAR_STEP
    grid_step: float = GRID_STEP
    outage_step: float = OUTAGE_STEP
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"need at least one trial, got {self.trials}")
        unknown = set(self.planners) - set(PLANNER_ORDER)
        if unknown:
            raise ValueError(f"unknown planners: {sorted(unknown)}")


def evaluate_planners(
    scenario: Scenario,
    planners=DEFAULT_PLANNERS,
    seed: int = 0,
    border_samples: int = BORDER_SAMPLES,
    angular_step: float = ANGULAR_STEP,
    grid_step: float = GRID_STEP,
    outage_step: float = OUTAGE_STEP,
):
    """Run the selected planners on one scenario; score each trajectory.

    Returns (reports, trajectories). Wall times are cumulative over the
    stages a planner needs: the optimized planner's time includes coverage
    construction and the base stage it refines.
    """
    wanted = [p for p in PLANNER_ORDER if p in planners]
    reports: list[PlannerReport] = []
    trajectories: dict[str, Trajectory | None] = {}

    def score(traj: Trajectory | None):
        if traj is None:
            return None, None
        return traj.length, outage_fraction(traj, scenario, outage_step)

    if "straight" in wanted:
        t0 = time.perf_counter()
        traj = straight_line_plan(scenario.mission)
        wall = (time.perf_counter() - t0) * 1e3
        length, outage = score(traj)
        trajectories["straight"] = traj
        reports.append(
            PlannerReport(seed, "straight", True, length, outage, 2, 1, wall)
        )

    needs_graph = {"base", "optimized"} & set(wanted)
    if needs_graph:
        t0 = time.perf_counter()
        feasible = True
        note = ""
        base = None
        feas_graph = None
        try:
            maps, commons = build_all_coverage(
                scenario, angular_step=angular_step, border_samples=border_samples
            )
            feas_graph = build_feasibility_graph(scenario, maps, commons)
            base = base_trajectory(scenario, maps, commons, graph=feas_graph)
            feasible = base is not None
            if not feasible:
                note = "no path between the mission endpoints in the feasibility graph"
        except InfeasibleEndpointError as exc:
            feasible = False
            note = str(exc)
        base_wall = (time.perf_counter() - t0) * 1e3

        if "base" in wanted:
            length, outage = score(base.trajectory if base else None)
            trajectories["base"] = base.trajectory if base else None
            reports.append(
                PlannerReport(
                    seed, "base", feasible, length, outage,
                    feas_graph.node_count if feas_graph else None,
                    feas_graph.edge_count if feas_graph else None,
                    base_wall, note,
                )
            )
        if "optimized" in wanted:
            if feasible:
                t1 = time.perf_counter()
                refined = build_refined_graph(base, scenario, maps, commons)
                traj = optimize_trajectory(base, scenario, maps, commons, graph=refined)
                wall = base_wall + (time.perf_counter() - t1) * 1e3
                length, outage = score(traj)
                trajectories["optimized"] = traj
                reports.append(
                    PlannerReport(
                        seed, "optimized", True, length, outage,
                        refined.node_count, refined.edge_count, wall,
                    )
                )
            else:
                trajectories["optimized"] = None
                reports.append(
                    PlannerReport(
                        seed, "optimized", False, None, None, None, None,
                        base_wall, note,
                    )
                )

    if "grid" in wanted:
        t0 = time.perf_counter()
        result = grid_baseline_plan(scenario, grid_step=grid_step)
        wall = (time.perf_counter() - t0) * 1e3
        length, outage = score(result.trajectory)
        trajectories["grid"] = result.trajectory
        reports.append(
            PlannerReport(
                seed, "grid", result.trajectory is not None, length, outage,
                result.node_count, result.edge_count, wall,
            )
        )

    return reports, trajectories


def _run_trial(args):
    scenario, config, trial = args
    seed = config.base_seed + trial
    stations = place_base_stations(
        scenario.city,
        k=len(scenario.base_stations),
        h_g=scenario.radio.bs_height,
        seed=seed,
    )
    trial_scenario = scenario.with_base_stations(stations)
    reports, _ = evaluate_planners(
        trial_scenario,
        planners=config.planners,
        seed=seed,
        border_samples=config.border_samples,
        angular_step=config.angular_step,
        grid_step=config.grid_step,
        outage_step=config.outage_step,
    )
    return reports


def run_monte_carlo(scenario: Scenario, config: MonteCarloConfig) -> list[PlannerReport]:
    """Re-draw station placement per trial (seeds S..S+N-1) and score planners.

    Infeasible trials are recorded, not fatal. Rows come back sorted by
    (seed, planner order), so aggregation is independent of execution order.
    """
    tasks = [(scenario, config, i) for i in range(config.trials)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            per_trial = list(pool.map(_run_trial, tasks))
    else:
        per_trial = [_run_trial(t) for t in tasks]
    rows: list[PlannerReport] = []
    for reports in per_trial:
        rows.extend(reports)
    return rows


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report_csv(reports: list[PlannerReport], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow(
                [
                    r.seed,
                    r.planner,
                    _csv_cell(r.length_m),
                    _csv_cell(r.outage),
                    _csv_cell(r.nodes),
                    _csv_cell(r.edges),
                    _csv_cell(round(r.wall_ms, 3)),
                ]
            )


def summarize_reports(reports: list[PlannerReport]) -> dict:
    """Aggregate per planner: feasibility rate, length and outage statistics."""
    summary: dict = {"planners": {}}
    planners = sorted({r.planner for r in reports}, key=PLANNER_ORDER.index)
    for name in planners:
        rows = [r for r in reports if r.planner == name]
        feasible = [r for r in rows if r.feasible]
        lengths = np.array([r.length_m for r in feasible], dtype=float)
        outages = np.array([r.outage for r in feasible], dtype=float)
        entry = {
            "trials": len(rows),
            "feasible": len(feasible),
            "feasibility_rate": len(feasible) / len(rows) if rows else 0.0,
            "mean_wall_ms": float(np.mean([r.wall_ms for r in rows])) if rows else 0.0,
        }
        if len(feasible):
            entry.update(
                {
                    "mean_length_m": float(lengths.mean()),
                    "median_length_m": float(np.median(lengths)),
                    "p90_length_m": float(np.percentile(lengths, 90)),
                    "mean_outage": float(outages.mean()),
                    "max_outage": float(outages.max()),
                    "mean_nodes": float(np.mean([r.nodes for r in feasible])),
                    "mean_edges": float(np.mean([r.edges for r in feasible])),
                }
            )
        summary["planners"][name] = entry
    return summary


def write_summary_json(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2) + "\n")

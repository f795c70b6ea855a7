"""Trajectory planners: two-stage coverage-graph search, grid baseline, straight line.

The feasibility stage connects the mission endpoints through station
projections and discretized common-border points; every edge of that graph is
coverage-safe by construction (sectors are wedges around the projection, so
the union is star-shaped about it). The refinement stage rebuilds a graph
restricted to the stations the base path visits and adds shortcut edges that
are verified to stay inside one station's coverage, then searches it again.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from heapq import heappop, heappush
from pathlib import Path
from typing import Sequence

import numpy as np

from .coverage import (
    CommonBorder,
    CoverageMap,
    network_covered,
    point_in_any_sector,
    points_in_coverage,
)
from .geometry import GEOM_EPS, Point3, sector_boundary_crossings
from .scenario import InvalidConfigError, Mission, Scenario

GRID_STEP = 10.0

NODE_START = "start"
NODE_GOAL = "goal"
NODE_BS = "bs_projection"
NODE_BORDER = "border_point"


class InfeasibleEndpointError(Exception):
    """A mission endpoint lies outside every station's coverage."""

    def __init__(self, endpoint: str, point: Point3):
        self.endpoint = endpoint
        self.point = point
        super().__init__(
            f"mission {endpoint} ({point.x:.1f}, {point.y:.1f}) is outside all coverage areas"
        )


class EdgeSafetyError(AssertionError):
    """A graph edge failed the dense-sampling coverage audit."""


@dataclass(frozen=True)
class GraphNode:
    id: int
    x: float
    y: float
    kind: str
    bs_id: int | None = None


@dataclass(eq=False)
class PlanGraph:
    """Weighted undirected graph over waypoint candidates."""

    nodes: tuple[GraphNode, ...]
    edges: tuple[tuple[int, int, float], ...]

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in self.nodes]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(eq=False)
class Trajectory:
    """Piecewise-linear fixed-altitude path from mission start to goal."""

    waypoints: tuple[Point3, ...]
    kind: str

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise ValueError("trajectory needs at least two waypoints")

    @property
    def length(self) -> float:
        return sum(
            a.distance_to(b) for a, b in zip(self.waypoints, self.waypoints[1:])
        )

    def xy_array(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.waypoints])


@dataclass(eq=False)
class BaseResult:
    """Feasibility-stage output: path plus the ordered stations it visits."""

    trajectory: Trajectory
    visited_stations: tuple
    visit_indices: tuple[int, ...]


@dataclass(eq=False)
class GridPlanResult:
    trajectory: Trajectory | None
    node_count: int
    edge_count: int


def _distance(a: GraphNode, b: GraphNode) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _dedupe_waypoints(points_xy, altitude: float) -> tuple[Point3, ...]:
    out: list[Point3] = []
    for x, y in points_xy:
        p = Point3(float(x), float(y), altitude)
        if out and math.hypot(p.x - out[-1].x, p.y - out[-1].y) <= 1e-9:
            continue
        out.append(p)
    return tuple(out)


# ---------------------------------------------------------------------------
# shortest path
# ---------------------------------------------------------------------------


def _dijkstra(adj: Sequence[Sequence[tuple[int, float]]], src: int, dst: int):
    """Min-heap Dijkstra; ties break toward the lower node id."""
    dist = {src: 0.0}
    parent: dict[int, int] = {}
    heap: list[tuple[float, int]] = [(0.0, src)]
    done = set()
    while heap:
        d, u = heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == dst:
            break
        for v, w in adj[u]:
            if v in done:
                continue
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                parent[v] = u
                heappush(heap, (nd, v))
    if dst not in done:
        return None, math.inf
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    path.reverse()
    return path, dist[dst]


def shortest_path(graph: PlanGraph, src: int, dst: int) -> list[int] | None:
    """Minimum-weight node sequence from src to dst, or None when disconnected."""
    if src == dst:
        return [src]
    path, _ = _dijkstra(graph.adjacency, src, dst)
    return path


# ---------------------------------------------------------------------------
# feasibility graph + base trajectory
# ---------------------------------------------------------------------------


def build_feasibility_graph(
    scenario: Scenario,
    maps: dict[int, CoverageMap],
    commons: dict[tuple[int, int], CommonBorder],
) -> PlanGraph:
    """Endpoints + station projections + all common-border points.

    Edges: endpoint-to-projection where the endpoint lies in that station's
    coverage, and each common-border point to both of its pair's projections.
    Every edge stays inside a single coverage area, so it is SNR-safe.
    """
    mission = scenario.mission
    start_xy = (mission.start.x, mission.start.y)
    goal_xy = (mission.goal.x, mission.goal.y)

    ids = sorted(maps)
    start_cover = [k for k in ids if point_in_any_sector(start_xy, maps[k])]
    if not start_cover:
        raise InfeasibleEndpointError("start", mission.start)
    goal_cover = [k for k in ids if point_in_any_sector(goal_xy, maps[k])]
    if not goal_cover:
        raise InfeasibleEndpointError("goal", mission.goal)

    nodes = [GraphNode(0, start_xy[0], start_xy[1], NODE_START)]
    bs_node: dict[int, int] = {}
    for k in ids:
        bs_node[k] = len(nodes)
        cx, cy = maps[k].center
        nodes.append(GraphNode(bs_node[k], cx, cy, NODE_BS, bs_id=k))
    border_nodes: list[tuple[int, tuple[int, int]]] = []
    for pair in sorted(commons):
        for x, y in commons[pair].points:
            nid = len(nodes)
            nodes.append(GraphNode(nid, float(x), float(y), NODE_BORDER))
            border_nodes.append((nid, pair))
    goal_id = len(nodes)
    nodes.append(GraphNode(goal_id, goal_xy[0], goal_xy[1], NODE_GOAL))

    edges: list[tuple[int, int, float]] = []
    for k in start_cover:
        edges.append((0, bs_node[k], _distance(nodes[0], nodes[bs_node[k]])))
    for nid, (k, j) in border_nodes:
        edges.append((bs_node[k], nid, _distance(nodes[bs_node[k]], nodes[nid])))
        edges.append((bs_node[j], nid, _distance(nodes[bs_node[j]], nodes[nid])))
    for k in goal_cover:
        edges.append((bs_node[k], goal_id, _distance(nodes[bs_node[k]], nodes[goal_id])))

    return PlanGraph(nodes=tuple(nodes), edges=tuple(edges))


def base_trajectory(
    scenario: Scenario,
    maps: dict[int, CoverageMap],
    commons: dict[tuple[int, int], CommonBorder],
    graph: PlanGraph | None = None,
) -> BaseResult | None:
    """Shortest path in the feasibility graph, or None when disconnected."""
    if graph is None:
        graph = build_feasibility_graph(scenario, maps, commons)
    goal_id = graph.node_count - 1
    path = shortest_path(graph, 0, goal_id)
    if path is None:
        return None
    altitude = scenario.radio.uav_altitude
    waypoints = _dedupe_waypoints(
        [(graph.nodes[i].x, graph.nodes[i].y) for i in path], altitude
    )
    visited_ids = [
        graph.nodes[i].bs_id for i in path if graph.nodes[i].kind == NODE_BS
    ]
    by_id = {bs.id: bs for bs in scenario.base_stations}
    return BaseResult(
        trajectory=Trajectory(waypoints=waypoints, kind="base"),
        visited_stations=tuple(by_id[k] for k in visited_ids),
        visit_indices=tuple(visited_ids),
    )


# ---------------------------------------------------------------------------
# refined graph + optimized trajectory
# ---------------------------------------------------------------------------


def segments_in_coverage(p0: np.ndarray, p1: np.ndarray, cov: CoverageMap) -> np.ndarray:
    """Batched exact segment-inside-sector-union test (endpoints assumed covered).

    For every segment, all boundary crossing parameters against every sector
    (two arc roots and two radial edges each) are gathered into a fixed slot
    table, unused slots filled with 1.0; after sorting, the midpoint of each
    consecutive sub-interval decides coverage, since membership is constant
    between crossings.
    """
    p0 = np.atleast_2d(np.asarray(p0, dtype=float))
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    n = p0.shape[0]
    if cov.is_empty:
        return np.zeros(n, dtype=bool)
    out = np.empty(n, dtype=bool)
    chunk = max(1, int(3_000_000 / max(1, 4 * len(cov.sectors) + 1)))
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        out[s:e] = _segments_in_coverage_chunk(p0[s:e], p1[s:e], cov)
    return out


def _segments_in_coverage_chunk(p0, p1, cov: CoverageMap) -> np.ndarray:
    starts, spans, radii = cov._sector_arrays
    center = np.asarray(cov.center)
    d = p1 - p0
    seg_len = np.hypot(d[:, 0], d[:, 1])
    degenerate = seg_len <= GEOM_EPS
    rel = p0 - center
    n = p0.shape[0]
    lam_tol = GEOM_EPS / np.maximum(seg_len, GEOM_EPS)

    hit_rows: list[np.ndarray] = []
    hit_lams: list[np.ndarray] = []

    aa = np.maximum((d * d).sum(axis=1), 1e-300)
    bb = 2.0 * (rel * d).sum(axis=1)
    cc0 = (rel * rel).sum(axis=1)
    disc = bb[:, None] ** 2 - 4.0 * aa[:, None] * (cc0[:, None] - radii[None, :] ** 2)
    ok = disc >= 0.0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    ang_tol = GEOM_EPS / np.maximum(radii, GEOM_EPS)
    for sign in (-1.0, 1.0):
        lam = (-bb[:, None] + sign * sq) / (2.0 * aa[:, None])
        px = rel[:, 0:1] + lam * d[:, 0:1]
        py = rel[:, 1:2] + lam * d[:, 1:2]
        az = np.arctan2(py, px)
        az = np.where(az < 0.0, az + 2.0 * math.pi, az)
        delta = (az - starts[None, :]) % (2.0 * math.pi)
        on_arc = (delta <= spans[None, :] + ang_tol[None, :]) | (
            delta >= 2.0 * math.pi - ang_tol[None, :]
        )
        keep = (
            ok
            & on_arc
            & (lam >= -lam_tol[:, None])
            & (lam <= 1.0 + lam_tol[:, None])
            & (radii[None, :] > 0.0)
        )
        rows, cols = np.nonzero(keep)
        hit_rows.append(rows)
        hit_lams.append(np.clip(lam[rows, cols], 0.0, 1.0))

    s_cross = rel[:, 0] * d[:, 1] - rel[:, 1] * d[:, 0]
    for edge_ang in (starts, starts + spans):
        ux = np.cos(edge_ang)
        uy = np.sin(edge_ang)
        denom = d[:, 0:1] * uy[None, :] - d[:, 1:2] * ux[None, :]
        near_par = np.abs(denom) <= 1e-15
        safe = np.where(near_par, 1.0, denom)
        lam = -(rel[:, 0:1] * uy[None, :] - rel[:, 1:2] * ux[None, :]) / safe
        s_par = s_cross[:, None] / -safe
        keep = (
            ~near_par
            & (lam >= -lam_tol[:, None])
            & (lam <= 1.0 + lam_tol[:, None])
            & (s_par >= -GEOM_EPS)
            & (s_par <= radii[None, :] + GEOM_EPS)
        )
        rows, cols = np.nonzero(keep)
        hit_rows.append(rows)
        hit_lams.append(np.clip(lam[rows, cols], 0.0, 1.0))

    rows = np.concatenate(hit_rows)
    lams = np.concatenate(hit_lams)
    # midpoints of consecutive crossing intervals per segment, plus the
    # leading [0, first] and trailing [last, 1] intervals; crossing-free
    # segments are decided by their midpoint alone
    order = np.lexsort((lams, rows))
    rows = rows[order]
    lams = lams[order]
    mid_rows = [np.arange(n)]
    mid_vals = [np.full(n, 0.5)]
    if rows.size:
        same = rows[1:] == rows[:-1]
        mid_rows.append(rows[1:][same])
        mid_vals.append((lams[1:][same] + lams[:-1][same]) / 2.0)
        first = np.ones(rows.size, dtype=bool)
        first[1:] = ~same
        mid_rows.append(rows[first])
        mid_vals.append(lams[first] / 2.0)
        last = np.ones(rows.size, dtype=bool)
        last[:-1] = ~same
        mid_rows.append(rows[last])
        mid_vals.append((lams[last] + 1.0) / 2.0)
    mid_rows = np.concatenate(mid_rows)
    mid_vals = np.concatenate(mid_vals)
    pts = p0[mid_rows] + mid_vals[:, None] * d[mid_rows]
    inside = points_in_coverage(pts, cov)
    result = np.ones(n, dtype=bool)
    np.logical_and.at(result, mid_rows, inside)
    if degenerate.any():
        result[degenerate] = points_in_coverage(p0[degenerate], cov)
    return result


def line_in_coverage(x, y, cov: CoverageMap) -> bool:
    """True iff the whole segment xy lies in the sector union of one map.

    Both endpoints are assumed covered. All sector-boundary crossing
    parameters are collected (via the per-sector crossing primitive); the
    midpoint of every resulting sub-interval is tested, which decides the
    segment exactly because membership is constant between consecutive
    crossings.
    """
    if cov.is_empty:
        return False
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if math.hypot(b[0] - a[0], b[1] - a[1]) <= GEOM_EPS:
        return point_in_any_sector(a, cov)
    starts, spans, radii = cov._sector_arrays
    lams = sector_boundary_crossings(a, b, cov.center, starts, spans, radii)
    cuts = np.sort(np.concatenate([[0.0, 1.0], lams]))
    mids = (cuts[:-1] + cuts[1:]) / 2.0
    pts = a[None, :] + mids[:, None] * (b - a)[None, :]
    return bool(points_in_coverage(pts, cov).all())


def build_refined_graph(
    base: BaseResult,
    scenario: Scenario,
    maps: dict[int, CoverageMap],
    commons: dict[tuple[int, int], CommonBorder],
) -> PlanGraph:
    """Graph over the base path's stations and their consecutive common borders.

    Edge families: endpoint spokes to the first/last visited projection;
    endpoint shortcuts to the first/last border set when the segment stays in
    the boundary station's coverage; border-to-border hops through each middle
    station's coverage; and spokes from every border point to its pair's two
    projections. The base path is a subgraph, so the refined search can only
    shorten it.
    """
    order = base.visit_indices
    kprime = len(order)
    mission = scenario.mission
    start_xy = (mission.start.x, mission.start.y)
    goal_xy = (mission.goal.x, mission.goal.y)

    nodes = [GraphNode(0, start_xy[0], start_xy[1], NODE_START)]
    u_node: list[int] = []
    for k in order:
        nid = len(nodes)
        cx, cy = maps[k].center
        nodes.append(GraphNode(nid, cx, cy, NODE_BS, bs_id=k))
        u_node.append(nid)
    slot_nodes: list[list[int]] = []
    for j in range(kprime - 1):
        pair = (min(order[j], order[j + 1]), max(order[j], order[j + 1]))
        pts = commons[pair].points if pair in commons else np.empty((0, 2))
        ids = []
        for x, y in pts:
            nid = len(nodes)
            nodes.append(GraphNode(nid, float(x), float(y), NODE_BORDER))
            ids.append(nid)
        slot_nodes.append(ids)
    goal_id = len(nodes)
    nodes.append(GraphNode(goal_id, goal_xy[0], goal_xy[1], NODE_GOAL))

    def dist(i: int, j: int) -> float:
        return _distance(nodes[i], nodes[j])

    def xy(i: int) -> tuple[float, float]:
        return (nodes[i].x, nodes[i].y)

    edges: list[tuple[int, int, float]] = [
        (0, u_node[0], dist(0, u_node[0])),
        (u_node[-1], goal_id, dist(u_node[-1], goal_id)),
    ]
    for j in range(kprime - 1):
        for nid in slot_nodes[j]:
            edges.append((u_node[j], nid, dist(u_node[j], nid)))
            edges.append((u_node[j + 1], nid, dist(u_node[j + 1], nid)))

    def add_checked(pairs, cov):
        if not pairs:
            return
        p0 = np.array([xy(u) for u, _ in pairs])
        p1 = np.array([xy(v) for _, v in pairs])
        for (u, v), good in zip(pairs, segments_in_coverage(p0, p1, cov)):
            if good:
                edges.append((u, v, dist(u, v)))

    if kprime >= 2:
        add_checked([(0, nid) for nid in slot_nodes[0]], maps[order[0]])
        add_checked([(nid, goal_id) for nid in slot_nodes[-1]], maps[order[-1]])
    for pivot in range(1, kprime - 1):
        add_checked(
            [(a, b) for a in slot_nodes[pivot - 1] for b in slot_nodes[pivot]],
            maps[order[pivot]],
        )

    return PlanGraph(nodes=tuple(nodes), edges=tuple(edges))


def optimize_trajectory(
    base: BaseResult,
    scenario: Scenario,
    maps: dict[int, CoverageMap],
    commons: dict[tuple[int, int], CommonBorder],
    graph: PlanGraph | None = None,
) -> Trajectory:
    """Shortest path in the refined graph; never longer than the base path."""
    if graph is None:
        graph = build_refined_graph(base, scenario, maps, commons)
    path = shortest_path(graph, 0, graph.node_count - 1)
    if path is None:  # cannot happen: the base path is a subgraph
        raise RuntimeError("refined graph unexpectedly disconnected")
    waypoints = _dedupe_waypoints(
        [(graph.nodes[i].x, graph.nodes[i].y) for i in path],
        scenario.radio.uav_altitude,
    )
    return Trajectory(waypoints=waypoints, kind="optimized")


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------


def straight_line_plan(mission: Mission) -> Trajectory:
    """Direct two-waypoint path; carries no coverage guarantee."""
    return Trajectory(waypoints=(mission.start, mission.goal), kind="straight")


def _segment_samples(p0: np.ndarray, p1: np.ndarray, spacing: float):
    """Points spaced <= spacing along each segment, endpoints included."""
    length = np.hypot(p1[:, 0] - p0[:, 0], p1[:, 1] - p0[:, 1])
    n_steps = np.maximum(np.ceil(length / spacing).astype(int), 1)
    reps = n_steps + 1
    seg_idx = np.repeat(np.arange(p0.shape[0]), reps)
    if np.all(reps == reps[0]):
        local = np.tile(np.linspace(0.0, 1.0, int(reps[0])), p0.shape[0])
    else:
        local = np.concatenate([np.linspace(0.0, 1.0, r) for r in reps])
    pts = p0[seg_idx] + local[:, None] * (p1[seg_idx] - p0[seg_idx])
    return pts, seg_idx


def grid_baseline_plan(scenario: Scenario, grid_step: float = GRID_STEP) -> GridPlanResult:
    """Lattice planner over the whole map with direct SNR coverage tests.

    A lattice node survives when covered by some station; an 8-neighbor edge
    survives when both endpoints are covered and samples every grid_step/4
    along it are covered too. Mission endpoints snap to the nearest covered
    node, connected only when the snap segment passes the same sampled check.
    """
    if grid_step <= 0.0:
        raise InvalidConfigError(f"grid step must be positive: {grid_step}")
    city = scenario.city
    xs = np.arange(0.0, city.width + 1e-9, grid_step)
    ys = np.arange(0.0, city.depth + 1e-9, grid_step)
    nx, ny = xs.size, ys.size
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    lattice = np.column_stack([gx.ravel(), gy.ravel()])  # idx = ix * ny + iy
    covered = network_covered(lattice, scenario)
    node_count = int(covered.sum())
    spacing = grid_step / 4.0

    adj: list[list[tuple[int, float]]] = [[] for _ in range(nx * ny + 2)]
    edge_count = 0
    offsets = ((1, 0), (0, 1), (1, 1), (1, -1))
    for dx, dy in offsets:
        ix, iy = np.meshgrid(np.arange(nx - dx), np.arange(ny), indexing="ij")
        jy = iy + dy
        valid = (jy >= 0) & (jy < ny)
        a_idx = (ix * ny + iy)[valid]
        b_idx = ((ix + dx) * ny + jy)[valid]
        keep = covered[a_idx] & covered[b_idx]
        a_idx, b_idx = a_idx[keep], b_idx[keep]
        if a_idx.size == 0:
            continue
        pts, seg_idx = _segment_samples(lattice[a_idx], lattice[b_idx], spacing)
        ok_samples = network_covered(pts, scenario)
        ok = np.ones(a_idx.size, dtype=bool)
        np.logical_and.at(ok, seg_idx, ok_samples)
        w = math.hypot(dx * grid_step, dy * grid_step)
        for a, b in zip(a_idx[ok], b_idx[ok]):
            adj[a].append((int(b), w))
            adj[b].append((int(a), w))
            edge_count += 1

    def snap(point: Point3, virtual_id: int) -> bool:
        target = np.array([point.x, point.y])
        if node_count == 0:
            return False
        cand = np.flatnonzero(covered)
        d = np.hypot(lattice[cand, 0] - target[0], lattice[cand, 1] - target[1])
        best = int(cand[np.argmin(d)])
        seg_len = float(d.min())
        if seg_len > GEOM_EPS:
            pts, _ = _segment_samples(
                target[None, :], lattice[best][None, :], spacing
            )
            if not network_covered(pts, scenario).all():
                return False
        adj[virtual_id].append((best, seg_len))
        adj[best].append((virtual_id, seg_len))
        return True

    src, dst = nx * ny, nx * ny + 1
    mission = scenario.mission
    if not snap(mission.start, src) or not snap(mission.goal, dst):
        return GridPlanResult(None, node_count, edge_count)
    path, _ = _dijkstra(adj, src, dst)
    if path is None:
        return GridPlanResult(None, node_count, edge_count)
    coords = [(mission.start.x, mission.start.y)]
    coords += [tuple(lattice[i]) for i in path[1:-1]]
    coords.append((mission.goal.x, mission.goal.y))
    waypoints = _dedupe_waypoints(coords, scenario.radio.uav_altitude)
    return GridPlanResult(
        Trajectory(waypoints=waypoints, kind="grid"), node_count, edge_count
    )


# ---------------------------------------------------------------------------
# audits + persistence
# ---------------------------------------------------------------------------


def audit_edge_safety(graph: PlanGraph, scenario: Scenario, step: float = 0.5) -> None:
    """Dense-sample every edge against the direct SNR model; raise on violation."""
    if not graph.edges:
        return
    p0 = np.array([[graph.nodes[u].x, graph.nodes[u].y] for u, _, _ in graph.edges])
    p1 = np.array([[graph.nodes[v].x, graph.nodes[v].y] for _, v, _ in graph.edges])
    pts, seg_idx = _segment_samples(p0, p1, step)
    ok_samples = network_covered(pts, scenario)
    if ok_samples.all():
        return
    bad = seg_idx[~ok_samples][0]
    u, v, _ = graph.edges[bad]
    raise EdgeSafetyError(
        f"edge {u}-{v} leaves coverage: "
        f"({graph.nodes[u].x:.1f},{graph.nodes[u].y:.1f}) -> "
        f"({graph.nodes[v].x:.1f},{graph.nodes[v].y:.1f})"
    )


def trajectory_to_dict(t: Trajectory) -> dict:
    edge_lengths = [
        a.distance_to(b) for a, b in zip(t.waypoints, t.waypoints[1:])
    ]
    return {
        "kind": t.kind,
        "waypoints": [[p.x, p.y, p.z] for p in t.waypoints],
        "edge_lengths_m": edge_lengths,
        "total_length_m": sum(edge_lengths),
    }


def save_trajectory(t: Trajectory, path: str | Path) -> None:
    Path(path).write_text(json.dumps(trajectory_to_dict(t), indent=2) + "\n")

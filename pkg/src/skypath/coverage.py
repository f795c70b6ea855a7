"""Per-station coverage: SNR model, LoS classification, sectorized coverage maps.

A station's coverage at the flight altitude is approximated by a union of
convex circular sectors around the station's plan-view projection. Along a
fixed azimuth, blocking is monotone: once a roof blocks the station-to-ring
segment at radius r, it blocks at every larger radius, because the segment's
altitude above that roof only decreases as the ring point moves out. The
covered set along a ray is therefore a single interval [0, R]; R has the
closed form

    R(theta) = min(r_los, max(r_nlos, first_blocking_radius(theta)))

where r_los / r_nlos are the LoS / NLoS disk radii and the first blocking
radius of one building is (entry distance) * (h - h_g) / (roof - h_g).

Sector radii are certified per azimuth cell: the infimum of R over the whole
cell is computed exactly (entry distances at cell edges plus corner and
perpendicular-foot critical azimuths), then shaved by a small safety margin,
so every claimed point holds SNR >= threshold with a strictly positive margin.
Point-sampled azimuths would over-claim between samples and break the
zero-outage guarantee.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np

from .geometry import (
    GEOM_EPS,
    TWO_PI,
    BuildingArrays,
    CircularSector,
    Point3,
    point_sector_distance,
    points_in_sectors,
    ray_rect_entry,
    segments_clear_buildings,
)
from .scenario import BaseStation, CityMap, InvalidConfigError, RadioParams, Scenario

# Angular resolution and sector post-processing defaults (0.5 degree cells).
ANGULAR_STEP = TWO_PI / 720.0
RADIUS_MERGE_TOL = 2.0
MIN_SECTOR_RADIUS = 5.0
BORDER_SAMPLES = 64
# Radial march step of the brute-force coverage oracle.
MARCH_STEP = 0.5
# Claimed radii are shaved by this margin so boundary points keep a strictly
# positive SNR margin under the grazing-counts-as-blocked rule.
RADIUS_SAFETY = 0.01


class LinkState(Enum):
    LOS = "los"
    NLOS = "nlos"


def classify_los(p: Point3, bs: BaseStation, city: CityMap) -> LinkState:
    """LoS iff the straight UAV-station segment clears every building."""
    if segments_clear_buildings(p.as_array(), bs.position.as_array(), city)[0]:
        return LinkState.LOS
    return LinkState.NLOS


def snr(p: Point3, bs: BaseStation, params: RadioParams, city: CityMap) -> float:
    """Linear SNR of the station-to-UAV link at point p.

    Distances below 1 m are clamped (near-field guard).
    """
    d = max(p.distance_to(bs.position), 1.0)
    if classify_los(p, bs, city) is LinkState.LOS:
        alpha, beta = params.alpha_los, params.beta_los
    else:
        alpha, beta = params.alpha_nlos, params.beta_nlos
    return params.tx_power_over_noise * beta * d ** (-alpha)


def coverage_disk_radius_sq(params: RadioParams, state: LinkState) -> float:
    """Squared horizontal coverage radius for one propagation state.

    Solves SNR >= threshold for the horizontal offset at the flight altitude;
    zero when the threshold cannot be met even directly overhead.
    """
    if state is LinkState.LOS:
        alpha, beta = params.alpha_los, params.beta_los
    else:
        alpha, beta = params.alpha_nlos, params.beta_nlos
    term = (params.tx_power_over_noise * beta / params.snr_threshold) ** (2.0 / alpha)
    dz2 = (params.uav_altitude - params.bs_height) ** 2
    return max(0.0, term - dz2)


def _crop_buildings(arrs: BuildingArrays, x_lo, x_hi, y_lo, y_hi) -> BuildingArrays:
    keep = (arrs.x1 >= x_lo) & (arrs.x0 <= x_hi) & (arrs.y1 >= y_lo) & (arrs.y0 <= y_hi)
    out = BuildingArrays.__new__(BuildingArrays)
    out.x0, out.x1 = arrs.x0[keep], arrs.x1[keep]
    out.y0, out.y1 = arrs.y0[keep], arrs.y1[keep]
    out.h = arrs.h[keep]
    return out


def snr_per_station(points_xy: np.ndarray, bs: BaseStation, params: RadioParams,
                    city: CityMap) -> np.ndarray:
    """Linear SNR from one station at many plan positions (flight altitude)."""
    xy = np.atleast_2d(np.asarray(points_xy, dtype=float))
    bx, by = bs.xy
    n = xy.shape[0]
    p0 = np.column_stack([xy, np.full(n, params.uav_altitude)])
    p1 = np.array([bx, by, params.bs_height])
    lo = np.minimum(xy.min(axis=0), [bx, by])
    hi = np.maximum(xy.max(axis=0), [bx, by])
    arrs = _crop_buildings(city.building_arrays(), lo[0], hi[0], lo[1], hi[1])
    los = segments_clear_buildings(p0, p1, arrs)
    d = np.sqrt(
        (xy[:, 0] - bx) ** 2
        + (xy[:, 1] - by) ** 2
        + (params.uav_altitude - params.bs_height) ** 2
    )
    d = np.maximum(d, 1.0)
    alpha = np.where(los, params.alpha_los, params.alpha_nlos)
    beta = np.where(los, params.beta_los, params.beta_nlos)
    return params.tx_power_over_noise * beta * d ** (-alpha)


def fan_blocked(center, points_xy: np.ndarray, city: CityMap, params: RadioParams) -> np.ndarray:
    """Blocking test for a fan of station-to-point segments, one shared station.

    Exactly equivalent to the generic per-segment slab test: a roof blocks the
    segment to a point at polar (az, r) around the station projection iff the
    footprint's ray entry distance t0 at that azimuth satisfies
    r >= t0 * max(1, climb / (roof + eps - h_g)). Buildings are processed over
    the azimuth-sorted points restricted to each footprint's subtended span.
    """
    xy = np.atleast_2d(np.asarray(points_xy, dtype=float))
    n = xy.shape[0]
    blocked = np.zeros(n, dtype=bool)
    arrs = city.building_arrays()
    if len(arrs) == 0 or n == 0:
        return blocked
    cx, cy = center
    dx = xy[:, 0] - cx
    dy = xy[:, 1] - cy
    r = np.hypot(dx, dy)
    az = np.arctan2(dy, dx)
    az = np.where(az < 0.0, az + TWO_PI, az)
    order = np.argsort(az, kind="stable")
    az_s = az[order]
    r_s = r[order]
    cos_s = np.cos(az_s)
    sin_s = np.sin(az_s)
    r_max = float(r_s.max())

    climb = params.uav_altitude - params.bs_height
    h_eff = arrs.h + GEOM_EPS
    can_block = h_eff > params.bs_height
    with np.errstate(divide="ignore"):
        factor = np.where(can_block, climb / (h_eff - params.bs_height), np.inf)
    factor = np.maximum(factor, 1.0)
    ndx = np.maximum(np.maximum(arrs.x0 - cx, cx - arrs.x1), 0.0)
    ndy = np.maximum(np.maximum(arrs.y0 - cy, cy - arrs.y1), 0.0)
    d_rect = np.hypot(ndx, ndy)
    keep = can_block & (factor * d_rect <= r_max)

    pad = 1e-9
    for b in np.flatnonzero(keep):
        x0, x1 = arrs.x0[b], arrs.x1[b]
        y0, y1 = arrs.y0[b], arrs.y1[b]
        near_az = math.atan2(
            min(max(cy, y0), y1) - cy, min(max(cx, x0), x1) - cx
        )
        rel = np.arctan2(
            np.array([y0, y0, y1, y1]) - cy, np.array([x0, x1, x0, x1]) - cx
        ) - near_az
        rel = (rel + math.pi) % TWO_PI - math.pi
        lo = near_az + rel.min() - pad
        hi = near_az + rel.max() + pad
        for a0, a1 in _unwrap_ranges(lo, hi):
            i = np.searchsorted(az_s, a0, side="left")
            j = np.searchsorted(az_s, a1, side="right")
            if i >= j:
                continue
            sl = slice(i, j)
            txmin, txmax = _slab_1d(cx, cos_s[sl], x0, x1)
            tymin, tymax = _slab_1d(cy, sin_s[sl], y0, y1)
            t_lo = np.maximum(np.maximum(txmin, tymin), 0.0)
            t_hi = np.minimum(txmax, tymax)
            hit = t_lo <= t_hi
            blocked_here = hit & (r_s[sl] >= t_lo * factor[b])
            if blocked_here.any():
                blocked[order[sl][blocked_here]] = True
    return blocked


def _slab_1d(a: float, d: np.ndarray, lo: float, hi: float):
    zero = d == 0.0
    safe = np.where(zero, 1.0, d)
    t1 = (lo - a) / safe
    t2 = (hi - a) / safe
    inside = lo <= a <= hi
    tmin = np.where(zero, -np.inf if inside else np.inf, np.minimum(t1, t2))
    tmax = np.where(zero, np.inf if inside else -np.inf, np.maximum(t1, t2))
    return tmin, tmax


def _unwrap_ranges(lo: float, hi: float):
    """Split an angle interval into in-range pieces of [0, 2*pi)."""
    if lo < 0.0:
        return ((lo + TWO_PI, TWO_PI + 1e-12), (0.0, hi))
    if hi >= TWO_PI:
        return ((lo, TWO_PI + 1e-12), (0.0, hi - TWO_PI))
    return ((lo, hi),)


def network_covered(points_xy: np.ndarray, scenario: Scenario) -> np.ndarray:
    """True where the best station meets the SNR threshold (direct model).

    Equivalent to max-over-stations snr >= threshold, organized so the
    expensive LoS test runs only where the NLoS disk alone cannot decide.
    """
    params = scenario.radio
    xy = np.atleast_2d(np.asarray(points_xy, dtype=float))
    n = xy.shape[0]
    if not scenario.base_stations:
        return np.zeros(n, dtype=bool)
    d_los_sq = coverage_disk_radius_sq(params, LinkState.LOS)
    d_nlos_sq = coverage_disk_radius_sq(params, LinkState.NLOS)

    bs_xy = np.array([bs.xy for bs in scenario.base_stations])
    d2 = (xy[:, 0:1] - bs_xy[None, :, 0]) ** 2 + (xy[:, 1:2] - bs_xy[None, :, 1]) ** 2
    d2 = d2.reshape(n, len(scenario.base_stations))
    covered = (d2 <= d_nlos_sq).any(axis=1)

    candidates = (d2 <= d_los_sq).sum(axis=0)
    for k in np.argsort(-candidates):
        if candidates[k] == 0:
            continue
        pend = np.flatnonzero(~covered & (d2[:, k] <= d_los_sq))
        if pend.size == 0:
            continue
        bs = scenario.base_stations[k]
        blocked = fan_blocked(bs.xy, xy[pend], scenario.city, params)
        covered[pend[~blocked]] = True
    return covered


# ---------------------------------------------------------------------------
# coverage maps
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class CoverageMap:
    """Ordered convex sectors around one station plus its discretized border."""

    bs_id: int
    center: tuple[float, float]
    sectors: tuple[CircularSector, ...]
    border_points: np.ndarray  # (Q, 2)

    @property
    def border_count(self) -> int:
        return int(self.border_points.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self.sectors) == 0

    @cached_property
    def _sector_arrays(self):
        starts = np.array([s.theta_start for s in self.sectors], dtype=float)
        spans = np.array([s.span for s in self.sectors], dtype=float)
        radii = np.array([s.radius for s in self.sectors], dtype=float)
        return starts, spans, radii

    @cached_property
    def _azimuth_sorted(self) -> bool:
        starts, spans, _ = self._sector_arrays
        ends = starts + spans
        return bool(
            (np.diff(starts) > 0.0).all() and (starts[1:] >= ends[:-1] - 1e-12).all()
        )

    @property
    def max_radius(self) -> float:
        if self.is_empty:
            return 0.0
        return float(self._sector_arrays[2].max())


@dataclass(eq=False)
class CommonBorder:
    """Discretized border points shared by a pair of coverage areas."""

    pair: tuple[int, int]
    points: np.ndarray  # (N, 2)


def points_in_coverage(points_xy: np.ndarray, cov: CoverageMap) -> np.ndarray:
    xy = np.atleast_2d(np.asarray(points_xy, dtype=float))
    if cov.is_empty:
        return np.zeros(xy.shape[0], dtype=bool)
    starts, spans, radii = cov._sector_arrays
    if not cov._azimuth_sorted or len(cov.sectors) < 4:
        return points_in_sectors(xy, cov.center, starts, spans, radii)
    # Sectors are azimuth-sorted and disjoint: only the sector bracketing the
    # point's azimuth (plus its two neighbors, for the boundary tolerance and
    # the 2*pi wrap) can contain it.
    dx = xy[:, 0] - cov.center[0]
    dy = xy[:, 1] - cov.center[1]
    r = np.hypot(dx, dy)
    az = np.arctan2(dy, dx)
    az = np.where(az < 0.0, az + TWO_PI, az)
    ang_tol = GEOM_EPS / np.maximum(r, GEOM_EPS)
    idx = np.searchsorted(starts, az, side="right") - 1
    m = starts.size
    inside = (r <= GEOM_EPS) & bool((radii > 0.0).any())
    for off in (-1, 0, 1):
        j = (idx + off) % m
        delta = (az - starts[j]) % TWO_PI
        ok = (delta <= spans[j] + ang_tol) | (delta >= TWO_PI - ang_tol)
        inside |= ok & (r <= radii[j] + GEOM_EPS)
    return inside


def point_in_any_sector(p, cov: CoverageMap) -> bool:
    return bool(points_in_coverage(np.asarray(p, dtype=float), cov)[0])


def distance_to_coverage(p, cov: CoverageMap) -> float:
    """Distance from p to the claimed coverage region (0 when inside)."""
    if cov.is_empty:
        return math.inf
    return min(point_sector_distance(p, s) for s in cov.sectors)


def _blocking_terms(center, city: CityMap, params: RadioParams, r_los: float):
    """Per-building blocking factor and pruned arrays around one station."""
    arrs = city.building_arrays()
    if len(arrs) == 0:
        return None
    cx, cy = center
    climb = params.uav_altitude - params.bs_height
    h_eff = arrs.h + GEOM_EPS
    ndx = np.maximum(np.maximum(arrs.x0 - cx, cx - arrs.x1), 0.0)
    ndy = np.maximum(np.maximum(arrs.y0 - cy, cy - arrs.y1), 0.0)
    d_rect = np.hypot(ndx, ndy)
    with np.errstate(divide="ignore"):
        factor = np.where(h_eff > params.bs_height, climb / (h_eff - params.bs_height), np.inf)
    keep = np.isfinite(factor) & (factor * d_rect < r_los)
    if not keep.any():
        return None
    return _crop_mask(arrs, keep), factor[keep]


def _crop_mask(arrs: BuildingArrays, keep: np.ndarray) -> BuildingArrays:
    out = BuildingArrays.__new__(BuildingArrays)
    out.x0, out.x1 = arrs.x0[keep], arrs.x1[keep]
    out.y0, out.y1 = arrs.y0[keep], arrs.y1[keep]
    out.h = arrs.h[keep]
    return out


def azimuth_coverage_radius(bs: BaseStation, theta: float, city: CityMap,
                            params: RadioParams) -> float:
    """Largest r with the whole radial segment out to r meeting the threshold.

    Closed form per the monotone-blocking argument; the radial march at
    MARCH_STEP is the brute-force reference for this value.
    """
    r_los = math.sqrt(coverage_disk_radius_sq(params, LinkState.LOS))
    r_nlos = math.sqrt(coverage_disk_radius_sq(params, LinkState.NLOS))
    if r_los <= 0.0:
        return 0.0
    terms = _blocking_terms(bs.xy, city, params, r_los)
    if terms is None:
        return r_los
    local, factor = terms
    cx, cy = bs.xy
    ux = np.array([[math.cos(theta)]])
    uy = np.array([[math.sin(theta)]])
    t0 = ray_rect_entry(cx, cy, ux, uy, local.x0, local.x1, local.y0, local.y1)[0]
    first_block = float((factor * t0).min()) if t0.size else math.inf
    return min(r_los, max(r_nlos, first_block))


def _certified_cell_radii(center, city: CityMap, params: RadioParams, n_cells: int) -> np.ndarray:
    """Infimum of the azimuth coverage radius over each angular cell.

    Along one azimuth the first blocking radius of building b is
    factor_b * t0_b(theta) with t0 the ray entry distance into the footprint.
    t0 is quasiconvex on the azimuth span that hits the footprint, so its
    infimum over a cell sits at a cell edge, a footprint corner azimuth, or
    the nearest-point azimuth; all are evaluated exactly.
    """
    r_los = math.sqrt(coverage_disk_radius_sq(params, LinkState.LOS))
    r_nlos = math.sqrt(coverage_disk_radius_sq(params, LinkState.NLOS))
    if r_los <= 0.0:
        return np.zeros(n_cells)
    terms = _blocking_terms(center, city, params, r_los)
    if terms is None:
        return np.full(n_cells, r_los)
    local, factor = terms
    cx, cy = center
    nb = len(local)
    step = TWO_PI / n_cells

    edges = np.linspace(0.0, TWO_PI, n_cells + 1)
    ux = np.cos(edges)[:, None]
    uy = np.sin(edges)[:, None]
    t0_edges = ray_rect_entry(cx, cy, ux, uy, local.x0, local.x1, local.y0, local.y1)
    cell_min = np.minimum(t0_edges[:-1], t0_edges[1:])  # (n_cells, nb)

    # Critical interior azimuths: 4 footprint corners + the nearest point.
    corner_x = np.stack([local.x0, local.x0, local.x1, local.x1])
    corner_y = np.stack([local.y0, local.y1, local.y0, local.y1])
    near_x = np.clip(cx, local.x0, local.x1)
    near_y = np.clip(cy, local.y0, local.y1)
    crit_x = np.concatenate([corner_x, near_x[None, :]], axis=0) - cx  # (5, nb)
    crit_y = np.concatenate([corner_y, near_y[None, :]], axis=0) - cy
    crit_az = np.arctan2(crit_y, crit_x)
    crit_az = np.where(crit_az < 0.0, crit_az + TWO_PI, crit_az)
    crit_d = np.hypot(crit_x, crit_y)

    b_idx = np.broadcast_to(np.arange(nb), crit_az.shape).ravel()
    az_flat = crit_az.ravel()
    d_flat = crit_d.ravel()
    guard = 1e-9
    for shift in (-guard, 0.0, guard):
        cells = np.floor((az_flat + shift) / step).astype(int) % n_cells
        np.minimum.at(cell_min, (cells, b_idx), d_flat)

    first_block = (factor[None, :] * cell_min).min(axis=1)
    return np.minimum(r_los, np.maximum(r_nlos, first_block))


def _cells_to_sectors(radii: np.ndarray, center, merge_tol: float,
                      min_radius: float) -> tuple[CircularSector, ...]:
    """Group adjacent cells of similar radius, split spans over pi, drop slivers.

    A group's radius is the minimum over its cells, so the claimed region never
    exceeds any constituent cell's certified radius.
    """
    n = radii.size
    edges = np.linspace(0.0, TWO_PI, n + 1)
    sectors: list[CircularSector] = []
    i = 0
    while i < n:
        lo = hi = radii[i]
        j = i + 1
        while j < n:
            nlo = min(lo, radii[j])
            nhi = max(hi, radii[j])
            if nhi - nlo >= merge_tol:
                break
            lo, hi = nlo, nhi
            j += 1
        if lo >= min_radius:
            a0, a1 = edges[i], edges[j]
            span = a1 - a0
            pieces = max(1, math.ceil(span / math.pi - 1e-12))
            for p in range(pieces):
                s0 = a0 + span * p / pieces
                s1 = a0 + span * (p + 1) / pieces
                sectors.append(
                    CircularSector(center, s0, min(s1, TWO_PI), float(lo))
                )
        i = j
    return tuple(sectors)


def build_coverage_map(
    bs: BaseStation,
    city: CityMap,
    params: RadioParams,
    angular_step: float = ANGULAR_STEP,
    border_samples: int = BORDER_SAMPLES,
    merge_tol: float = RADIUS_MERGE_TOL,
    min_radius: float = MIN_SECTOR_RADIUS,
) -> CoverageMap:
    """Sectorized coverage map of one station, with a discretized border."""
    n_cells = round(TWO_PI / angular_step)
    if n_cells < 2 or abs(n_cells * angular_step - TWO_PI) > 1e-9:
        raise InvalidConfigError(f"angular_step must evenly divide 2*pi: {angular_step}")
    radii = _certified_cell_radii(bs.xy, city, params, n_cells)
    radii = np.maximum(radii - RADIUS_SAFETY, 0.0)
    sectors = _cells_to_sectors(radii, bs.xy, merge_tol, min_radius)
    cov = CoverageMap(
        bs_id=bs.id, center=bs.xy, sectors=sectors, border_points=np.empty((0, 2))
    )
    return discretize_border(cov, border_samples)


def _boundary_items(sectors: tuple[CircularSector, ...]):
    """Boundary walk of the sector union: arcs plus radial walls at junctions."""
    items = []
    m = len(sectors)
    for idx, s in enumerate(sectors):
        items.append(("arc", s.theta_start, s.span, s.radius))
        nxt = sectors[(idx + 1) % m]
        gap_start = s.theta_end
        gap_end = nxt.theta_start + (TWO_PI if idx + 1 == m else 0.0)
        if gap_end - gap_start > 1e-12:
            # Azimuth gap: the boundary drops to the apex and climbs back out.
            items.append(("wall", s.theta_end, s.radius, 0.0))
            items.append(("wall", nxt.theta_start, 0.0, nxt.radius))
        elif abs(s.radius - nxt.radius) > 1e-12:
            items.append(("wall", nxt.theta_start, s.radius, nxt.radius))
    return items


def discretize_border(cov: CoverageMap, q: int) -> CoverageMap:
    """Place q points uniformly by arc length along the coverage perimeter."""
    if q < 1:
        raise InvalidConfigError(f"border sample count must be >= 1: {q}")
    if cov.is_empty:
        return replace(cov, border_points=np.empty((0, 2)))
    items = _boundary_items(cov.sectors)
    lengths = np.array(
        [it[3] * it[2] if it[0] == "arc" else abs(it[3] - it[2]) for it in items]
    )
    total = float(lengths.sum())
    if total <= 0.0:
        return replace(cov, border_points=np.empty((0, 2)))

    cx, cy = cov.center
    targets = np.arange(q) * (total / q)
    points = np.empty((q, 2))
    item_idx = 0
    consumed = 0.0
    for pi, s_target in enumerate(targets):
        while s_target >= consumed + lengths[item_idx] and item_idx < len(items) - 1:
            consumed += lengths[item_idx]
            item_idx += 1
        local = s_target - consumed
        kind, ang0, a, b = items[item_idx]
        if kind == "arc":
            ang = ang0 + (local / b if b > 0.0 else 0.0)
            points[pi] = (cx + b * math.cos(ang), cy + b * math.sin(ang))
        else:
            r_here = a + math.copysign(local, b - a)
            points[pi] = (cx + r_here * math.cos(ang0), cy + r_here * math.sin(ang0))
    return replace(cov, border_points=points)


def common_border_points(cov_a: CoverageMap, cov_b: CoverageMap) -> CommonBorder:
    """Border points of either map that fall inside the other map's coverage."""
    pair = (cov_a.bs_id, cov_b.bs_id)
    if cov_a.is_empty or cov_b.is_empty:
        return CommonBorder(pair, np.empty((0, 2)))
    gap = math.hypot(
        cov_a.center[0] - cov_b.center[0], cov_a.center[1] - cov_b.center[1]
    )
    if gap > cov_a.max_radius + cov_b.max_radius + GEOM_EPS:
        return CommonBorder(pair, np.empty((0, 2)))
    pts = []
    if cov_a.border_count:
        pts.append(cov_a.border_points[points_in_coverage(cov_a.border_points, cov_b)])
    if cov_b.border_count:
        pts.append(cov_b.border_points[points_in_coverage(cov_b.border_points, cov_a)])
    points = np.vstack(pts) if pts else np.empty((0, 2))
    return CommonBorder(pair, points)


def build_all_coverage(scenario: Scenario, angular_step: float = ANGULAR_STEP,
                       border_samples: int = BORDER_SAMPLES):
    """Coverage maps for every station plus all pairwise common borders."""
    maps = {
        bs.id: build_coverage_map(
            bs, scenario.city, scenario.radio,
            angular_step=angular_step, border_samples=border_samples,
        )
        for bs in scenario.base_stations
    }
    ids = sorted(maps)
    commons = {}
    for i, k in enumerate(ids):
        for j in ids[i + 1:]:
            cb = common_border_points(maps[k], maps[j])
            if cb.points.shape[0]:
                commons[(k, j)] = cb
    return maps, commons


def save_coverage_dump(maps: dict[int, CoverageMap], path: str | Path) -> None:
    """Write per-station sectors and border points as JSON, for plotting."""
    payload = [
        {
            "bs_id": cov.bs_id,
            "center": list(cov.center),
            "sectors": [
                {
                    "theta_start": s.theta_start,
                    "theta_end": s.theta_end,
                    "radius": s.radius,
                }
                for s in cov.sectors
            ],
            "border_points": cov.border_points.tolist(),
        }
        for _, cov in sorted(maps.items())
    ]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")

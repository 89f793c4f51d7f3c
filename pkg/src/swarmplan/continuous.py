"""Continuous planning for unit-disk robots in the plane.

Two planners lift the discrete grid scheduler to disks of radius 1:

* :func:`plan_separated` — when starts and targets are pairwise
  4-separated, overlay a square grid of mesh ``2*sqrt(2)`` whose lines
  avoid all disk centers.  Cell diagonals have length 4, so every cell
  holds at most one start and one target center.  Snapping each disk to
  its cell center induces a discrete instance; the discrete schedule is
  replayed with one time unit of duration ``2*sqrt(2)`` per step, which
  lets disks on incident edges touch at midpoints without overlapping.
  Makespan is proportional to the maximum start-target distance ``d``.

* :func:`plan_dense` — for merely 2-separated (touching allowed)
  arrangements: phase one spreads the disks out (vertical slices of at
  most ``ceil(sqrt(N))`` disks separated by ``4*sqrt(2)`` buffers, then
  vertical spreading within each slice) and snaps them onto grid
  vertices; phase two routes the two snapped configurations discretely;
  phase three is phase one run on the targets, reversed.  Makespan is
  proportional to ``d + sqrt(N)``.

:func:`validate_trajectories` checks any trajectory set exactly:
per-segment speed and the pairwise minimum distance of co-temporal
linear motions in closed form (no sampling), with tolerance 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Cell, GridDims, Instance, Schedule, ScheduleError, apply_schedule
from .scheduler import plan_auto

MESH = 2.0 * math.sqrt(2.0)
BUFFER = 4.0 * math.sqrt(2.0)
EPS = 1e-9

Point = tuple[float, float]


class SeparationViolatedError(ScheduleError):
    """Pairwise separation required by the planner does not hold."""


@dataclass(frozen=True)
class ContinuousInstance:
    """Start and target centers of unit-disk robots.

    Starts must be pairwise at distance >= 2, and likewise targets
    (touching disks are allowed).
    """

    start: dict[int, Point]
    target: dict[int, Point]

    def __post_init__(self) -> None:
        if set(self.start) != set(self.target):
            raise ValueError("start and target name different robots")
        for name, pts in (("start", self.start), ("target", self.target)):
            check_separation(pts, 2.0, name)

    @property
    def robots(self) -> list[int]:
        return sorted(self.start)

    @property
    def max_distance(self) -> float:
        return max(
            (_dist(self.start[r], self.target[r]) for r in self.start), default=0.0
        )


def check_separation(points: dict[int, Point], sep: float, label: str) -> None:
    items = sorted(points.items())
    for i, (r, p) in enumerate(items):
        for s, q in items[i + 1 :]:
            if _dist(p, q) < sep - EPS:
                raise SeparationViolatedError(
                    f"{label} centers of robots {r} and {s} are "
                    f"{_dist(p, q):.6f} < {sep} apart"
                )


def _dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


# --- trajectories ---------------------------------------------------------

Trajectory = list[tuple[float, Point]]  # (time, point) breakpoints


@dataclass
class TrajectorySet:
    """One trajectory per robot; robots hold position past their last
    breakpoint, so all trajectories share the common makespan."""

    paths: dict[int, Trajectory]

    @property
    def makespan(self) -> float:
        return max((p[-1][0] for p in self.paths.values() if p), default=0.0)

    def position(self, robot: int, t: float) -> Point:
        path = self.paths[robot]
        if t <= path[0][0]:
            return path[0][1]
        for (t0, p0), (t1, p1) in zip(path, path[1:]):
            if t <= t1:
                f = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
                return (p0[0] + f * (p1[0] - p0[0]), p0[1] + f * (p1[1] - p0[1]))
        return path[-1][1]


@dataclass
class ValidationReport:
    compatible: bool
    endpoint_errors: list[str] = field(default_factory=list)
    speed_violations: list[tuple[int, int, float]] = field(default_factory=list)
    separation_violations: list[tuple[int, int, float, float]] = field(
        default_factory=list
    )
    min_separation: float = math.inf

    def __bool__(self) -> bool:
        return self.compatible


def _segment_min_dist(
    p0: Point, v: Point, q0: Point, w: Point, t0: float, t1: float
) -> tuple[float, float]:
    """Minimum distance (and its time) between two points moving
    linearly over [t0, t1]: p(t) = p0 + (t-t0)v, q(t) = q0 + (t-t0)w."""
    rx, ry = p0[0] - q0[0], p0[1] - q0[1]
    ux, uy = v[0] - w[0], v[1] - w[1]
    uu = ux * ux + uy * uy
    if uu == 0.0:
        return math.hypot(rx, ry), t0
    tau = -(rx * ux + ry * uy) / uu  # unclamped minimizer offset
    tau = min(max(tau, 0.0), t1 - t0)
    return math.hypot(rx + tau * ux, ry + tau * uy), t0 + tau


def validate_trajectories(
    ts: TrajectorySet, instance: ContinuousInstance | None = None
) -> ValidationReport:
    """Exact compatibility check; collects violations, never raises."""
    report = ValidationReport(compatible=True)
    for r, path in sorted(ts.paths.items()):
        if not path:
            report.endpoint_errors.append(f"robot {r}: empty trajectory")
            continue
        times = [t for t, _ in path]
        if any(b < a for a, b in zip(times, times[1:])):
            report.endpoint_errors.append(f"robot {r}: times not monotone")
        for i, ((t0, p0), (t1, p1)) in enumerate(zip(path, path[1:])):
            if t1 > t0:
                speed = _dist(p0, p1) / (t1 - t0)
                if speed > 1.0 + EPS:
                    report.speed_violations.append((r, i, speed))
            elif p0 != p1:
                report.speed_violations.append((r, i, math.inf))
        if instance is not None:
            if _dist(path[0][1], instance.start[r]) > EPS:
                report.endpoint_errors.append(f"robot {r}: wrong start point")
            if _dist(path[-1][1], instance.target[r]) > EPS:
                report.endpoint_errors.append(f"robot {r}: wrong target point")

    robots = sorted(r for r, p in ts.paths.items() if p)
    if len(robots) >= 2:
        # one global breakpoint grid: trajectories are linear between
        # consecutive grid times, so the per-interval minimum of the
        # relative motion |r0 + tau*u| is closed-form per pair
        cuts = sorted({t for r in robots for t, _ in ts.paths[r]} | {0.0, ts.makespan})
        grid = np.asarray(cuts)
        pos = np.empty((len(robots), len(cuts), 2))
        for idx, r in enumerate(robots):
            times = np.asarray([t for t, _ in ts.paths[r]])
            for axis in (0, 1):
                coords = np.asarray([p[axis] for _, p in ts.paths[r]])
                pos[idx, :, axis] = np.interp(grid, times, coords)
        iu, ju = np.triu_indices(len(robots), 1)
        for k in range(len(cuts) - 1):
            r0 = pos[iu, k] - pos[ju, k]
            u = (pos[iu, k + 1] - pos[ju, k + 1]) - r0
            uu = np.einsum("ij,ij->i", u, u)
            ru = np.einsum("ij,ij->i", r0, u)
            tau = np.divide(-ru, uu, out=np.zeros_like(uu), where=uu > 0.0)
            tau = np.clip(tau, 0.0, 1.0)
            closest = r0 + tau[:, None] * u
            dist = np.sqrt(np.einsum("ij,ij->i", closest, closest))
            low = float(dist.min())
            if low < report.min_separation:
                report.min_separation = low
            for b in np.nonzero(dist < 2.0 - EPS)[0]:
                t_hit = cuts[k] + float(tau[b]) * (cuts[k + 1] - cuts[k])
                report.separation_violations.append(
                    (robots[int(iu[b])], robots[int(ju[b])], t_hit, float(dist[b]))
                )
    report.compatible = not (
        report.endpoint_errors
        or report.speed_violations
        or report.separation_violations
    )
    return report


# --- grid overlay ---------------------------------------------------------


def _find_offset(coords: list[float]) -> float:
    """A grid-origin offset leaving every coordinate > 1e-6 away from
    all grid lines, found by a deterministic scan of mesh fractions."""
    candidates = 2 * len(coords) + 3
    for k in range(candidates):
        off = MESH * (2 * k + 1) / (2 * candidates)
        if all(
            min((c - off) % MESH, MESH - (c - off) % MESH) > 1e-6 for c in coords
        ):
            return off
    raise AssertionError("offset search exhausted all candidates")


@dataclass(frozen=True)
class _Overlay:
    """A mesh-2*sqrt(2) grid positioned so no given center lies on a line."""

    ox: float
    oy: float

    @classmethod
    def avoiding(cls, points: list[Point]) -> "_Overlay":
        return cls(
            ox=_find_offset([p[0] for p in points]),
            oy=_find_offset([p[1] for p in points]),
        )

    def cell_of(self, p: Point) -> Cell:
        return (
            math.floor((p[0] - self.ox) / MESH),
            math.floor((p[1] - self.oy) / MESH),
        )

    def center_of(self, cell: Cell) -> Point:
        return (
            self.ox + (cell[0] + 0.5) * MESH,
            self.oy + (cell[1] + 0.5) * MESH,
        )

    def vertex_of(self, cell: Cell) -> Point:
        return (self.ox + cell[0] * MESH, self.oy + cell[1] * MESH)


def _discrete_instance(
    start_cells: dict[int, Cell], target_cells: dict[int, Cell], margin: int = 3
) -> tuple[Instance, Cell]:
    """Shift cell indices to a nonnegative grid with a margin so that
    the discrete planner has room to grow clusters."""
    cells = list(start_cells.values()) + list(target_cells.values())
    x0 = min(c[0] for c in cells) - margin
    y0 = min(c[1] for c in cells) - margin
    x1 = max(c[0] for c in cells) + margin
    y1 = max(c[1] for c in cells) + margin
    dims = GridDims(x1 - x0 + 1, y1 - y0 + 1)
    shift = lambda c: (c[0] - x0, c[1] - y0)  # noqa: E731
    instance = Instance(
        dims=dims,
        start={r: shift(c) for r, c in start_cells.items()},
        target={r: shift(c) for r, c in target_cells.items()},
    )
    return instance, (x0, y0)


def _expand_schedule(
    paths: dict[int, Trajectory],
    schedule: Schedule,
    instance: Instance,
    locate,
    t: float,
) -> float:
    """Append the discrete schedule to the trajectories, one time unit
    of duration 2*sqrt(2) per step; ``locate`` maps a shifted grid cell
    to its point in the plane."""
    placement = dict(instance.start)
    moves = {"N": (0, 1), "E": (1, 0), "S": (0, -1), "W": (-1, 0), ".": (0, 0)}
    for step in schedule:
        t += MESH
        for r, d in step.items():
            dx, dy = moves[d]
            if not dx and not dy:
                continue
            x, y = placement[r]
            # breakpoints only where a robot moves: pin it at its old spot
            # first so the linear interpolation does not start drifting early
            if paths[r][-1][0] < t - MESH:
                paths[r].append((t - MESH, locate(placement[r])))
            placement[r] = (x + dx, y + dy)
            paths[r].append((t, locate(placement[r])))
    for r in instance.robots:
        if paths[r][-1][0] < t:
            paths[r].append((t, locate(placement[r])))
    assert placement == instance.target
    return t


# --- separated planner ----------------------------------------------------


def plan_separated(instance: ContinuousInstance) -> TrajectorySet:
    """Trajectories for pairwise 4-separated starts and targets.

    Makespan is 4 plus 2*sqrt(2) per discrete step; since each disk
    moves at most 2 while snapping and the snapped cells are distinct,
    both snap phases keep all pairs at least 2 apart.
    """
    check_separation(instance.start, 4.0, "start")
    check_separation(instance.target, 4.0, "target")
    points = list(instance.start.values()) + list(instance.target.values())
    overlay = _Overlay.avoiding(points)
    start_cells = {r: overlay.cell_of(p) for r, p in instance.start.items()}
    target_cells = {r: overlay.cell_of(p) for r, p in instance.target.items()}
    discrete, (x0, y0) = _discrete_instance(start_cells, target_cells)
    schedule = plan_auto(discrete)
    apply_schedule(discrete, schedule)

    locate = lambda c: overlay.center_of((c[0] + x0, c[1] + y0))  # noqa: E731
    paths: dict[int, Trajectory] = {}
    for r in instance.robots:
        paths[r] = [(0.0, instance.start[r]), (2.0, locate(discrete.start[r]))]
    t = _expand_schedule(paths, schedule, discrete, locate, 2.0)
    for r in instance.robots:
        paths[r].append((t + 2.0, instance.target[r]))
    return TrajectorySet(paths)


# --- dense planner --------------------------------------------------------


def _spread(points: dict[int, Point]) -> list[dict[int, Point]]:
    """Phase-one waypoints before snapping: after buffer insertion and
    after vertical spreading.  Guarantees every pair ends up at
    horizontal or vertical distance >= 4*sqrt(2)."""
    order = sorted(points, key=lambda r: (points[r][0], points[r][1], r))
    n = len(order)
    width = math.ceil(math.sqrt(n)) if n else 1
    slice_of = {r: i // width for i, r in enumerate(order)}

    buffered = {
        r: (points[r][0] + slice_of[r] * BUFFER, points[r][1]) for r in points
    }

    spread = dict(buffered)
    for q in range(max(slice_of.values(), default=-1) + 1):
        members = sorted(
            (r for r in points if slice_of[r] == q),
            key=lambda r: (buffered[r][1], buffered[r][0], r),
        )
        floor = -math.inf
        for r in members:
            x, y = buffered[r]
            y = max(y, floor + BUFFER)
            spread[r] = (x, y)
            floor = y

    return [buffered, spread]


def _append_waypoints(
    paths: dict[int, Trajectory], stages: list[dict[int, Point]], t: float
) -> float:
    for stage in stages:
        span = max(
            (_dist(paths[r][-1][1], stage[r]) for r in stage), default=0.0
        )
        if span <= EPS:
            continue
        t += span
        for r, p in stage.items():
            paths[r].append((t, p))
    return t


def plan_dense(instance: ContinuousInstance) -> TrajectorySet:
    """Trajectories for 2-separated arrangements; makespan proportional
    to d + sqrt(N).

    Phase one spreads and snaps starts onto grid vertices, phase two
    routes the two snapped configurations on the grid, phase three
    reverses phase one run on the targets.
    """
    if len(instance.robots) == 1:
        (r,) = instance.robots
        return TrajectorySet(
            {
                r: [
                    (0.0, instance.start[r]),
                    (instance.max_distance, instance.target[r]),
                ]
            }
        )
    in_stages = _spread(instance.start)
    out_stages = _spread(instance.target)

    # one grid must serve both snapped configurations, so the offset
    # search sees the spread positions of starts and targets together
    overlay = _Overlay.avoiding(
        list(in_stages[-1].values()) + list(out_stages[-1].values())
    )
    in_snap = {r: overlay.cell_of(p) for r, p in in_stages[-1].items()}
    out_snap = {r: overlay.cell_of(p) for r, p in out_stages[-1].items()}
    in_stages.append({r: overlay.vertex_of(c) for r, c in in_snap.items()})
    out_stages.append({r: overlay.vertex_of(c) for r, c in out_snap.items()})
    start_cells, target_cells = in_snap, out_snap
    discrete, (x0, y0) = _discrete_instance(start_cells, target_cells)
    schedule = plan_auto(discrete)
    apply_schedule(discrete, schedule)

    paths: dict[int, Trajectory] = {
        r: [(0.0, instance.start[r])] for r in instance.robots
    }
    t = _append_waypoints(paths, in_stages, 0.0)
    locate = lambda c: overlay.vertex_of((c[0] + x0, c[1] + y0))  # noqa: E731
    t = _expand_schedule(paths, schedule, discrete, locate, t)
    back = [out_stages[1], out_stages[0], dict(instance.target)]
    _append_waypoints(paths, back, t)
    return TrajectorySet(paths)

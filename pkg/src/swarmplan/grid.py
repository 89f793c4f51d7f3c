"""Grid model: configurations, transformation steps, schedules, metrics.

Robots live on an n1 x n2 grid with zero-based coordinates, (0, 0) in the
bottom-left corner.  A configuration places each labeled robot on its own
cell.  One transformation step moves every robot by at most one cell
(N/E/S/W or wait); no two robots may end the step on the same cell and no
two robots may exchange positions.  Rotating a fully occupied cycle of
cells is legal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

Cell = tuple[int, int]
Step = dict[int, str]
Schedule = list[Step]

MOVE_VECTORS: dict[str, Cell] = {
    "N": (0, 1),
    "E": (1, 0),
    "S": (0, -1),
    "W": (-1, 0),
    ".": (0, 0),
}
OPPOSITE = {"N": "S", "S": "N", "E": "W", "W": "E", ".": "."}


class ScheduleError(Exception):
    """Base class for everything the model can reject."""


class OutOfBoundsError(ScheduleError):
    def __init__(self, robot: int, cell: Cell):
        super().__init__(f"robot {robot} leaves the grid at {cell}")
        self.robot = robot
        self.cell = cell


class UnknownRobotError(ScheduleError):
    def __init__(self, robot: int):
        super().__init__(f"step refers to unknown robot {robot}")
        self.robot = robot


class CollisionError(ScheduleError):
    def __init__(self, cell: Cell, robots: tuple[int, ...]):
        super().__init__(f"robots {robots} collide on {cell}")
        self.cell = cell
        self.robots = robots


class SwapError(ScheduleError):
    def __init__(self, robot_a: int, robot_b: int):
        super().__init__(f"robots {robot_a} and {robot_b} exchange positions")
        self.robot_a = robot_a
        self.robot_b = robot_b


class StepViolationError(ScheduleError):
    def __init__(self, index: int, inner: ScheduleError):
        super().__init__(f"step {index}: {inner}")
        self.index = index
        self.inner = inner


class TargetMismatchError(ScheduleError):
    def __init__(self, robot: int, got: Cell, want: Cell):
        super().__init__(f"robot {robot} ends on {got}, target is {want}")
        self.robot = robot
        self.got = got
        self.want = want


class InfeasibleError(ScheduleError):
    """Instance admits no schedule (degenerate grid shapes)."""


class NotFullyOccupiedError(ScheduleError):
    """Operation requires every cell to hold a robot."""


@dataclass(frozen=True)
class GridDims:
    n1: int  # columns
    n2: int  # rows

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"bad grid dims {self.n1}x{self.n2}")

    @property
    def cells(self) -> int:
        return self.n1 * self.n2

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.n1 and 0 <= cell[1] < self.n2

    def infeasible(self) -> bool:
        """Shapes on which some permutation has no schedule at all."""
        if self.n1 == 1 or self.n2 == 1:
            return True
        return self.n1 == 2 and self.n2 == 2


@dataclass(frozen=True)
class Configuration:
    dims: GridDims
    placement: dict[int, Cell]  # robot label -> cell

    def __post_init__(self) -> None:
        for robot, cell in self.placement.items():
            if not self.dims.contains(cell):
                raise OutOfBoundsError(robot, cell)
        if len(set(self.placement.values())) != len(self.placement):
            seen: dict[Cell, int] = {}
            for robot, cell in self.placement.items():
                if cell in seen:
                    raise CollisionError(cell, (seen[cell], robot))
                seen[cell] = robot

    @property
    def robots(self) -> list[int]:
        return sorted(self.placement)

    def occupied(self) -> dict[Cell, int]:
        return {cell: robot for robot, cell in self.placement.items()}

    def fully_occupied(self) -> bool:
        return len(self.placement) == self.dims.cells


@dataclass(frozen=True)
class Instance:
    dims: GridDims
    start: dict[int, Cell]
    target: dict[int, Cell]

    def __post_init__(self) -> None:
        if set(self.start) != set(self.target):
            raise ValueError("start and target must place the same robots")
        Configuration(self.dims, self.start)
        Configuration(self.dims, self.target)

    @property
    def robots(self) -> list[int]:
        return sorted(self.start)

    def start_config(self) -> Configuration:
        return Configuration(self.dims, self.start)

    def is_trivial(self) -> bool:
        return self.start == self.target


def _apply_step_inplace(dims: GridDims, placement: dict[int, Cell], occ: dict[Cell, int], step: Step) -> None:
    """Apply one step, mutating ``placement`` and its occupancy index ``occ``.

    Raises on any violation; on failure the two dicts may be inconsistent,
    so callers own the copies they pass in.
    """
    if not step:
        return
    n1, n2 = dims.n1, dims.n2
    moved: list[tuple[int, Cell, Cell]] = []
    for robot, move in step.items():
        src = placement.get(robot)
        if src is None:
            raise UnknownRobotError(robot)
        try:
            dx, dy = MOVE_VECTORS[move]
        except KeyError:
            raise ScheduleError(f"robot {robot}: unknown move {move!r}") from None
        if move == ".":
            continue
        x, y = src
        dst = (x + dx, y + dy)
        if not (0 <= dst[0] < n1 and 0 <= dst[1] < n2):
            raise OutOfBoundsError(robot, dst)
        moved.append((robot, src, dst))

    dst_of: dict[Cell, Cell] = {}
    for robot, src, dst in moved:
        del occ[src]
        dst_of[src] = dst
    for robot, src, dst in moved:
        other = occ.get(dst)
        if other is not None:
            raise CollisionError(dst, (other, robot))
        occ[dst] = robot
        placement[robot] = dst
        # Swap: some mover left dst and lands exactly on src.
        if dst_of.get(dst) == src:
            other = occ.get(src)
            if other is None:
                other = next(r for r, s, d in moved if s == dst)
            raise SwapError(min(robot, other), max(robot, other))


def apply_step(dims: GridDims, placement: dict[int, Cell], step: Step) -> dict[int, Cell]:
    """Apply one step to a placement dict, raising on any violation.

    Returns a new placement; the input is left untouched.
    """
    new_placement = dict(placement)
    occ = {cell: r for r, cell in placement.items()}
    _apply_step_inplace(dims, new_placement, occ, step)
    return new_placement


def validate_step(config: Configuration, step: Step) -> Configuration:
    return Configuration(config.dims, apply_step(config.dims, config.placement, step))


def apply_schedule(instance: Instance, schedule: Schedule, *, check_target: bool = True) -> Configuration:
    """Run a schedule from the start configuration, validating every step."""
    placement = dict(instance.start)
    occ = {cell: r for r, cell in placement.items()}
    for index, step in enumerate(schedule):
        try:
            _apply_step_inplace(instance.dims, placement, occ, step)
        except ScheduleError as exc:
            raise StepViolationError(index, exc) from exc
    if check_target:
        for robot in instance.robots:
            if placement[robot] != instance.target[robot]:
                raise TargetMismatchError(robot, placement[robot], instance.target[robot])
    return Configuration(instance.dims, placement)


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def max_distance(instance: Instance) -> int:
    """d = the largest start-to-target Manhattan distance over all robots."""
    if not instance.start:
        return 0
    return max(manhattan(instance.start[r], instance.target[r]) for r in instance.robots)


def makespan(schedule: Schedule) -> int:
    return len(schedule)


def stretch(instance: Instance, schedule: Schedule) -> Fraction:
    d = max_distance(instance)
    if d == 0:
        return Fraction(0)
    return Fraction(len(schedule), d)


def reverse_schedule(schedule: Schedule) -> Schedule:
    """Running the reversal from the end configuration restores the start."""
    return [{r: OPPOSITE[m] for r, m in step.items()} for step in reversed(schedule)]


def strip_waits(schedule: Schedule) -> Schedule:
    """Drop explicit waits and empty steps (keeps semantics, shrinks output)."""
    out: Schedule = []
    for step in schedule:
        cleaned = {r: m for r, m in step.items() if m != "."}
        if cleaned:
            out.append(cleaned)
    return out


def merge_parallel(parts: list[Schedule]) -> Schedule:
    """Zip schedules that touch pairwise disjoint robot sets into one.

    Shorter schedules idle once exhausted.
    """
    length = max((len(p) for p in parts), default=0)
    merged: Schedule = []
    for i in range(length):
        step: Step = {}
        for part in parts:
            if i < len(part):
                overlap = step.keys() & part[i].keys()
                if overlap:
                    raise ValueError(f"parallel schedules share robots {sorted(overlap)[:4]}")
                step.update(part[i])
        merged.append(step)
    return merged


def move_towards(src: Cell, dst: Cell) -> str:
    """Unit move taking src one cell closer to an adjacent dst."""
    dx, dy = dst[0] - src[0], dst[1] - src[1]
    for name, vec in MOVE_VECTORS.items():
        if vec == (dx, dy):
            return name
    raise ValueError(f"{src} and {dst} are not adjacent")

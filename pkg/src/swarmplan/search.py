"""Exhaustive breadth-first search over whole configurations.

Feasible only when the number of placements of the robots on the grid
is tiny; it serves two callers: the exact-optimum oracle, and the
scheduler's exact fallback for grids too small for the main pipeline.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from math import perm

from .grid import Cell, GridDims, Schedule

# directions recovered when reconstructing a schedule from BFS parents
_DIR_OF = {(0, 1): "N", (1, 0): "E", (0, -1): "S", (-1, 0): "W"}

State = tuple[Cell, ...]


def state_count(dims: GridDims, n_robots: int) -> int:
    """Number of injective placements: an upper bound on BFS states."""
    return perm(dims.cells, n_robots)


def bfs_plan(
    dims: GridDims,
    start: dict[int, Cell],
    target: dict[int, Cell],
    cap: int | None = None,
) -> tuple[Schedule, int] | None:
    """A makespan-optimal schedule by BFS, or None if ``cap`` steps do
    not suffice.  The caller is responsible for keeping the state space
    small (see :func:`state_count`)."""
    robots = sorted(start)
    k = len(robots)
    init: State = tuple(start[r] for r in robots)
    goal: State = tuple(target[r] for r in robots)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]

    neigh: dict[Cell, tuple[Cell, ...]] = {}
    for x in range(dims.n1):
        for y in range(dims.n2):
            neigh[(x, y)] = tuple(
                c
                for c in ((x, y), (x, y + 1), (x + 1, y), (x, y - 1), (x - 1, y))
                if dims.contains(c)
            )

    parent: dict[State, State | None] = {init: None}
    frontier: deque[State] = deque([init])
    depth = 0
    while frontier and goal not in parent and (cap is None or depth < cap):
        depth += 1
        for _ in range(len(frontier)):
            state = frontier.popleft()
            for dests in product(*(neigh[c] for c in state)):
                if dests in parent or len(set(dests)) != k:
                    continue
                # simultaneous moves may chain but not swap head-on
                if any(
                    dests[i] == state[j]
                    and dests[j] == state[i]
                    and dests[i] != state[i]
                    for i, j in pairs
                ):
                    continue
                parent[dests] = state
                frontier.append(dests)
            if goal in parent:
                break
    if goal not in parent:
        return None

    states: list[State] = [goal]
    while parent[states[-1]] is not None:
        states.append(parent[states[-1]])
    states.reverse()
    schedule: Schedule = []
    for prev, curr in zip(states, states[1:]):
        step = {}
        for r, a, b in zip(robots, prev, curr):
            if a != b:
                step[r] = _DIR_OF[(b[0] - a[0], b[1] - a[1])]
        schedule.append(step)
    return schedule, len(schedule)

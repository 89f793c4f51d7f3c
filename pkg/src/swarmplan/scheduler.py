"""Top-level planners.

plan_full handles fully occupied grids: tile the grid at pitch 12d, clean
the inter-tile flow, partition it into bounded subflows, realize them, and
finish with parallel in-tile routing.  plan_sparse handles few, far-moving
robots by staging through odd- and even-coordinate configurations with
per-row sweeps.  plan_auto dispatches between the two, clustering dense
spots into disjoint rectangles padded with filler robots when neither case
applies directly.
"""
from __future__ import annotations

import math
from itertools import count

from .grid import (
    Cell,
    Configuration,
    GridDims,
    InfeasibleError,
    Instance,
    NotFullyOccupiedError,
    Schedule,
    ScheduleError,
    Step,
    apply_step,
    max_distance,
    merge_parallel,
    move_towards,
    reverse_schedule,
)
from .flowpart import partition_subflows
from .realize import realize_all
from .rotatesort import plan_rotatesort, route_region
from .search import bfs_plan, state_count
from .tiling import build_flow, build_tiling, remove_bidirectional, remove_crossings


class CaseBoundsViolatedError(ScheduleError):
    pass


# ---------------------------------------------------------------------------
# fully occupied grids


# Fixed step budget per unit of distance.  Schedules shorter than
# STRETCH_BUDGET * d are padded with wait steps so that the makespan of a
# fully occupied instance depends only on d, never on the grid dimensions.
# The value is calibrated above the worst makespan the pipeline produces.
STRETCH_BUDGET = 1200


def _pad_schedule(schedule: Schedule, d: int, pad: bool) -> Schedule:
    if pad and len(schedule) < STRETCH_BUDGET * d:
        schedule = schedule + [{} for _ in range(STRETCH_BUDGET * d - len(schedule))]
    return schedule


def plan_full(instance: Instance, *, pad: bool = True) -> Schedule:
    """Constant-stretch schedule for a fully occupied grid.

    With ``pad`` (the default) the schedule is extended by wait steps to
    exactly ``STRETCH_BUDGET * d`` steps, making the makespan a function of
    the distance bound alone.  Pass ``pad=False`` for the raw schedule.
    """
    if instance.dims.infeasible():
        raise InfeasibleError(f"grid {instance.dims.n1}x{instance.dims.n2} is infeasible")
    config = instance.start_config()
    if not config.fully_occupied():
        raise NotFullyOccupiedError("plan_full requires every cell occupied")
    d = max_distance(instance)
    if d == 0:
        return []
    if min(instance.dims.n1, instance.dims.n2) < 24 * d:
        # tiles could not host the realization machinery; the whole grid is
        # small relative to d, so direct mesh routing is already O(d)
        return _pad_schedule(plan_rotatesort(instance), d, pad)

    tiling = build_tiling(instance.dims, d)
    flow = build_flow(instance, tiling)
    s1, config, flow = remove_crossings(config, flow, tiling, instance.target)
    s2, config, flow = remove_bidirectional(config, flow, tiling, instance.target)
    partition = partition_subflows(flow, d)
    s3 = realize_all(config, partition, tiling, instance.target)
    placement = dict(config.placement)
    for step in s3:
        placement = apply_step(instance.dims, placement, step)

    # Step 5: all robots are in their target tiles; permute every tile in
    # parallel.
    parts = []
    for tile in tiling.tiles():
        rect = tiling.tile_rect(tile)
        x0, y0, w, h = rect
        local = {r: c for r, c in placement.items()
                 if x0 <= c[0] < x0 + w and y0 <= c[1] < y0 + h}
        goal = {r: instance.target[r] for r in local}
        if any(local[r] != goal[r] for r in local):
            sched, pos = route_region(placement, goal, rect)
            placement.update(pos)
            parts.append(sched)
    s4 = merge_parallel(parts) if parts else []
    return _pad_schedule(s1 + s2 + s3 + s4, d, pad)


# ---------------------------------------------------------------------------
# sparse instances (few robots, each possibly moving far)


def _nearest_parity(v: int, parity: int, lo: int, hi: int) -> int:
    v = v if v % 2 == parity else v - 1
    return max(lo, min(v, hi))


def _assign_distinct(order: list[int], coord: dict[int, int], parity: int,
                     n: int) -> dict[int, int]:
    """Order-preserving distinct columns of the given parity in [0, n)."""
    hi = n - 1 if (n - 1) % 2 == parity else n - 2
    if hi < parity or (hi - parity) // 2 + 1 < len(order):
        raise CaseBoundsViolatedError("not enough columns of the required parity")
    cols = []
    for r in order:
        c = _nearest_parity(coord[r], parity, parity, hi)
        if cols and c <= cols[-1]:
            c = cols[-1] + 2
        cols.append(c)
    for k in range(len(cols) - 1, -1, -1):
        cap = hi - 2 * (len(cols) - 1 - k)
        if cols[k] > cap:
            cols[k] = cap
        else:
            break
    return dict(zip(order, cols))


def _march_vertical(dims: GridDims, placement: dict[int, Cell],
                    goal_y: dict[int, int]) -> Schedule:
    """All robots occupy distinct columns: move each straight to its row."""
    schedule: Schedule = []
    while True:
        step: Step = {}
        for r, (x, y) in placement.items():
            if y != goal_y[r]:
                step[r] = "N" if goal_y[r] > y else "S"
        if not step:
            return schedule
        new = apply_step(dims, placement, step)
        placement.clear()
        placement.update(new)
        schedule.append(step)


def _march_rows(dims: GridDims, placement: dict[int, Cell],
                goal_x: dict[int, int]) -> Schedule:
    """Robots sit in their final rows with per-row positions in target
    order; sweep rightward movers, then leftward movers."""
    schedule: Schedule = []
    for sign, mv in ((1, "E"), (-1, "W")):
        while True:
            step: Step = {}
            for r, (x, y) in placement.items():
                if (goal_x[r] - x) * sign > 0:
                    step[r] = mv
            if not step:
                break
            new = apply_step(dims, placement, step)
            placement.clear()
            placement.update(new)
            schedule.append(step)
    return schedule


def _detour_march(dims: GridDims, placement: dict[int, Cell],
                  goal_x: dict[int, int]) -> Schedule:
    """Horizontal stage between odd rows: movers hop one row up, march
    along the empty even row, and drop back on reaching their column."""
    schedule: Schedule = []
    for sign, mv in ((1, "E"), (-1, "W")):
        movers = {r for r, (x, y) in placement.items() if (goal_x[r] - x) * sign > 0}
        if not movers:
            continue
        lifted: set[int] = set()
        while movers or lifted:
            step: Step = {}
            for r in list(movers):
                step[r] = "N"
                movers.discard(r)
                lifted.add(r)
            for r in list(lifted):
                if r in step:
                    continue
                x, _ = placement[r]
                if x == goal_x[r]:
                    step[r] = "S"
                    lifted.discard(r)
                else:
                    step[r] = mv
            new = apply_step(dims, placement, step)
            placement.clear()
            placement.update(new)
            schedule.append(step)
    return schedule


def _evenize(dims: GridDims, placement: dict[int, Cell]) -> tuple[Schedule, tuple[int, int]]:
    """Push robots out of an odd last column/row via chain shifts, so the
    working area has even side lengths."""
    schedule: Schedule = []
    n1e = dims.n1 - dims.n1 % 2
    n2e = dims.n2 - dims.n2 % 2
    for axis, limit in ((0, n1e), (1, n2e)):
        if (dims.n1 if axis == 0 else dims.n2) == limit:
            continue
        occupied = set(placement.values())
        step: Step = {}
        for r, c in placement.items():
            if c[axis] != limit:
                continue
            # chain of occupied cells shrinking along the axis
            chain = [r]
            cur = c
            while True:
                nxt = (cur[0] - 1, cur[1]) if axis == 0 else (cur[0], cur[1] - 1)
                if nxt[axis] < 0:
                    raise CaseBoundsViolatedError("full line blocks the parity shift")
                if nxt not in occupied:
                    break
                chain.append(next(rr for rr, cc in placement.items() if cc == nxt))
                cur = nxt
            for rr in chain:
                step[rr] = "W" if axis == 0 else "S"
        if step:
            new = apply_step(dims, placement, step)
            placement.clear()
            placement.update(new)
            schedule.append(step)
    return schedule, (n1e, n2e)


def plan_sparse(instance: Instance) -> Schedule:
    """Sweep planner for case (1): N ≤ ⌈n1/4⌉ and N ≤ d.

    Stages: start → odd coordinates (distinct columns) → intermediate
    (target columns, source rows) → even coordinates → target.  Horizontal
    motion finishes before the vertical stage.
    """
    dims = instance.dims
    robots = instance.robots
    N = len(robots)
    d = max_distance(instance)
    if d == 0 or N == 0:
        return []
    if N > math.ceil(dims.n1 / 4) or N > d:
        raise CaseBoundsViolatedError(
            f"N={N} violates case-(1) bounds for n1={dims.n1}, d={d}")

    placement = dict(instance.start)
    if N == 1:
        # no other robots: straight L-shaped path
        (r,) = robots
        schedule: Schedule = []
        while placement[r] != instance.target[r]:
            (x, y), (tx, ty) = placement[r], instance.target[r]
            if x != tx:
                step = {r: "E" if tx > x else "W"}
            else:
                step = {r: "N" if ty > y else "S"}
            placement = apply_step(dims, placement, step)
            schedule.append(step)
        return schedule

    pre, (n1e, n2e) = _evenize(dims, placement)
    target = dict(instance.target)
    post_placement = dict(target)
    post, _ = _evenize(dims, post_placement)
    target = dict(post_placement)

    start = dict(placement)
    s_order = sorted(robots, key=lambda r: (start[r], r))
    t_order = sorted(robots, key=lambda r: (target[r], r))
    xo = _assign_distinct(s_order, {r: start[r][0] for r in robots}, 1, n1e)
    xe = _assign_distinct(t_order, {r: target[r][0] for r in robots}, 0, n1e)
    yo = {r: _nearest_parity(start[r][1], 1, 1, n2e - 3) for r in robots}
    ye = {r: _nearest_parity(target[r][1], 0, 0, n2e - 2) for r in robots}

    # start → odd configuration, planned backwards: from distinct columns a
    # vertical stage then per-row sweeps reach the start configuration
    sim = {r: (xo[r], yo[r]) for r in robots}
    back = _march_vertical(dims, sim, {r: start[r][1] for r in robots})
    back += _march_rows(dims, sim, {r: start[r][0] for r in robots})
    assert sim == start
    schedule = pre + reverse_schedule(back)
    placement = {r: (xo[r], yo[r]) for r in robots}

    # odd → intermediate (horizontal, detour over even rows) → even
    schedule += _detour_march(dims, placement, xe)
    schedule += _march_vertical(dims, placement, ye)

    # even → target: vertical stage in distinct columns, then row sweeps
    schedule += _march_vertical(dims, placement, {r: target[r][1] for r in robots})
    schedule += _march_rows(dims, placement, {r: target[r][0] for r in robots})
    assert placement == target
    return schedule + reverse_schedule(post)


# ---------------------------------------------------------------------------
# general instances: case dispatch and clustering


def _bbox(cells: list[Cell], dims: GridDims) -> tuple[int, int, int, int]:
    x0 = min(c[0] for c in cells)
    y0 = min(c[1] for c in cells)
    w = max(c[0] for c in cells) - x0 + 1
    h = max(c[1] for c in cells) - y0 + 1
    return _inflate((x0, y0, w, h), dims, min_w=2, min_h=2)


def _inflate(rect: tuple[int, int, int, int], dims: GridDims, *,
             min_w: int = 1, min_h: int = 1) -> tuple[int, int, int, int]:
    x0, y0, w, h = rect
    while w < min_w:
        if x0 + w < dims.n1:
            w += 1
        elif x0 > 0:
            x0 -= 1
            w += 1
        else:
            raise InfeasibleError("cluster cannot grow to a feasible rectangle")
    while h < min_h:
        if y0 + h < dims.n2:
            h += 1
        elif y0 > 0:
            y0 -= 1
            h += 1
        else:
            raise InfeasibleError("cluster cannot grow to a feasible rectangle")
    return (x0, y0, w, h)


def _intersects(a, b) -> bool:
    return not (a[0] + a[2] <= b[0] or b[0] + b[2] <= a[0]
                or a[1] + a[3] <= b[1] or b[1] + b[3] <= a[1])


def _merge_rects(rects: list[tuple[int, int, int, int]]) -> list[tuple[int, int, int, int]]:
    rects = list(rects)
    changed = True
    while changed:
        changed = False
        for i in range(len(rects)):
            for j in range(i + 1, len(rects)):
                if _intersects(rects[i], rects[j]):
                    a, b = rects[i], rects[j]
                    x0 = min(a[0], b[0])
                    y0 = min(a[1], b[1])
                    x1 = max(a[0] + a[2], b[0] + b[2])
                    y1 = max(a[1] + a[3], b[1] + b[3])
                    rects[i] = (x0, y0, x1 - x0, y1 - y0)
                    del rects[j]
                    changed = True
                    break
            if changed:
                break
    return rects


def _plan_cluster(instance: Instance, rect: tuple[int, int, int, int]) -> Schedule:
    """Fully occupy the cluster rectangle with filler robots, plan it as a
    small grid, and strip the fillers from the emitted steps."""
    x0, y0, w, h = rect
    inside = {r: c for r, c in instance.start.items()
              if x0 <= c[0] < x0 + w and y0 <= c[1] < y0 + h}
    local_start = {r: (c[0] - x0, c[1] - y0) for r, c in inside.items()}
    local_target = {r: (instance.target[r][0] - x0, instance.target[r][1] - y0)
                    for r in inside}
    filler_ids = count(max(instance.robots, default=0) + 1)
    start_occ = set(local_start.values())
    target_occ = set(local_target.values())
    # cells free on both ends keep identity fillers; cells that a real
    # robot vacates/claims get fillers moving the other way
    vacated = sorted(start_occ - target_occ)
    claimed = sorted(target_occ - start_occ)
    swing = dict(zip(claimed, vacated))
    for cell in ((x, y) for x in range(w) for y in range(h)):
        if cell not in start_occ:
            rid = next(filler_ids)
            local_start[rid] = cell
            local_target[rid] = swing.get(cell, cell)
    local = Instance(GridDims(w, h), local_start, local_target)
    schedule = plan_full(local, pad=False)
    return [{r: m for r, m in step.items() if r in inside} for step in schedule]


def plan_auto(instance: Instance) -> Schedule:
    """Case dispatch: sparse sweep when N ≤ ⌈n1/4⌉ and N ≤ d, otherwise
    disjoint cluster rectangles planned as fully occupied subgrids."""
    d = max_distance(instance)
    if d == 0:
        return []
    N = len(instance.robots)
    if N == 1:
        return _plan_single(instance)
    # exact search for grids far too small for the pipeline's geometry
    if instance.dims.cells <= 9 and N <= 4:
        return _plan_exact(instance)
    if N <= math.ceil(instance.dims.n1 / 4) and N <= d:
        return plan_sparse(instance)

    rects = [_bbox([c, instance.target[r]], instance.dims)
             for r, c in instance.start.items()
             if c != instance.target[r]]
    try:
        while True:
            rects = _merge_rects(rects)
            assert all(not _intersects(a, b)
                       for i, a in enumerate(rects) for b in rects[i + 1:])
            parts = []
            bad = None
            for i, rect in enumerate(rects):
                try:
                    parts.append(_plan_cluster(instance, rect))
                except InfeasibleError:
                    bad = i
                    break
            if bad is None:
                return merge_parallel(parts)
            rects[bad] = _inflate(rects[bad], instance.dims,
                                  min_w=rects[bad][2] + 1, min_h=rects[bad][3] + 1)
    except InfeasibleError:
        # degenerate geometry (e.g. 1-row grids): fall back to exact
        # search when the configuration space is small enough
        if N <= 4 and state_count(instance.dims, N) <= 50_000:
            return _plan_exact(instance)
        raise


def _plan_exact(instance: Instance) -> Schedule:
    found = bfs_plan(instance.dims, instance.start, instance.target)
    if found is None:
        raise InfeasibleError(
            f"no schedule exists for this {instance.dims.n1}x{instance.dims.n2} instance"
        )
    return found[0]


def _plan_single(instance: Instance) -> Schedule:
    """One robot: walk horizontally, then vertically."""
    (r,) = instance.robots
    (x, y), (tx, ty) = instance.start[r], instance.target[r]
    schedule: Schedule = []
    while x != tx:
        schedule.append({r: "E" if tx > x else "W"})
        x += 1 if tx > x else -1
    while y != ty:
        schedule.append({r: "N" if ty > y else "S"})
        y += 1 if ty > y else -1
    return schedule

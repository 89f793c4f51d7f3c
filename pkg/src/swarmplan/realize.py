"""Turning subflows into actual robot motion.

A subflow prescribes, for every pair of adjacent tiles, how many robots
must cross between them.  Realization places the crossing robots in
stacks behind the relevant tile side, then performs one global
transformation step per subflow: every crossing robot advances over the
boundary while a "tunnel" inside the receiving tile shifts by one cell to
absorb it, ending at the back of an outgoing stack whose front robot
leaves simultaneously.  Tunnels of one tile are routed along concentric
hull rings with nested boundary arcs, so they are pairwise vertex
disjoint; stacks for a sequence of subflows sit in the first few hulls
and advance by themselves as their fronts depart.
"""
from __future__ import annotations

from dataclasses import dataclass

from .grid import (
    Cell,
    Configuration,
    Schedule,
    ScheduleError,
    Step,
    apply_step,
    merge_parallel,
)
from .flowpart import Cycle, Subflow, SubflowPartition
from .rotatesort import Rect, route_region
from .tiling import Edge, Tile, Tiling

SIDE_NAMES = ("S", "E", "N", "W")


class CardinalityMismatchError(ScheduleError):
    pass


class TileTooSmallError(ScheduleError):
    pass


class TooManySubflowsError(ScheduleError):
    pass


# ---------------------------------------------------------------------------
# tile geometry: depths, hull rings, boundary parameterization


def _depth(rect: Rect, cell: Cell) -> int:
    x0, y0, w, h = rect
    x, y = cell
    return 1 + min(x - x0, y - y0, x0 + w - 1 - x, y0 + h - 1 - y)


def _side_of(rect: Rect, cell: Cell) -> int:
    """Nearest side (0=S, 1=E, 2=N, 3=W); ties raise TileTooSmall."""
    x0, y0, w, h = rect
    x, y = cell
    dists = (y - y0, x0 + w - 1 - x, y0 + h - 1 - y, x - x0)
    m = min(dists)
    if dists.count(m) > 1:
        raise TileTooSmallError(f"terminal {cell} equidistant from two sides of {rect}")
    return dists.index(m)


def _ring_cells(rect: Rect, p: int) -> list[Cell]:
    """Cells at depth exactly p, in counterclockwise order from the
    bottom-left ring corner."""
    x0, y0, w, h = rect
    rx0, ry0 = x0 + p - 1, y0 + p - 1
    rw, rh = w - 2 * (p - 1), h - 2 * (p - 1)
    if rw < 2 or rh < 2:
        raise TileTooSmallError(f"hull ring {p} does not fit in tile {rect}")
    cells = []
    for x in range(rx0, rx0 + rw):
        cells.append((x, ry0))
    for y in range(ry0 + 1, ry0 + rh):
        cells.append((rx0 + rw - 1, y))
    for x in range(rx0 + rw - 2, rx0 - 1, -1):
        cells.append((x, ry0 + rh - 1))
    for y in range(ry0 + rh - 2, ry0, -1):
        cells.append((rx0, y))
    return cells


def _project(rect: Rect, cell: Cell, side: int, p: int) -> Cell:
    """Cell at depth p reached from ``cell`` perpendicular to ``side``."""
    x0, y0, w, h = rect
    x, y = cell
    if side == 0:
        out = (x, y0 + p - 1)
    elif side == 1:
        out = (x0 + w - p, y)
    elif side == 2:
        out = (x, y0 + h - p)
    else:
        out = (x0 + p - 1, y)
    if _depth(rect, out) != p:
        raise TileTooSmallError(f"stub from {cell} exits hull ring {p} of {rect}")
    return out


def _stub(rect: Rect, cell: Cell, side: int, p: int) -> list[Cell]:
    """Perpendicular cells from ``cell`` (inclusive) inward to depth p."""
    return [_project(rect, cell, side, q) for q in range(_depth(rect, cell), p + 1)]


def boundary_matching(rect: Rect, incoming: list[Cell], outgoing: list[Cell],
                      base: int) -> list[tuple[Cell, Cell, list[Cell]]]:
    """Match incoming to outgoing terminals with vertex-disjoint paths.

    Terminals sit near the tile boundary (depth < base).  Pairs are
    extracted greedily: some incoming/outgoing pair is cyclically adjacent
    among the remaining terminals, so the boundary arc between them is
    free of other terminals.  Pair i is routed along hull ring base+i:
    perpendicular stub in, arc over the recorded terminal-free side, stub
    out.  Nesting makes all paths pairwise vertex-disjoint (asserted).
    """
    if len(incoming) != len(outgoing):
        raise CardinalityMismatchError(
            f"{len(incoming)} incoming vs {len(outgoing)} outgoing terminals")
    if not incoming:
        return []

    x0, y0, w, h = rect
    perimeter = 2 * (w + h) - 4

    def offset(cell: Cell, side: int) -> int:
        bx, by = _project(rect, cell, side, 1)
        if side == 0:
            return bx - x0
        if side == 1:
            return (w - 1) + (by - y0)
        if side == 2:
            return (w - 1) + (h - 1) + (x0 + w - 1 - bx)
        return (w - 1) + (h - 1) + (w - 1) + (y0 + h - 1 - by)

    terms = []
    for kind, cells in (("in", incoming), ("out", outgoing)):
        for cell in cells:
            side = _side_of(rect, cell)
            if _depth(rect, cell) >= base:
                raise TileTooSmallError(f"terminal {cell} deeper than hull base {base}")
            terms.append((offset(cell, side), kind, cell, side))
    terms.sort()
    if len({t[0] for t in terms}) != len(terms):
        raise TileTooSmallError("two terminals share a boundary offset")

    # greedy extraction of cyclically adjacent opposite-kind pairs
    pairs = []  # (in_term, out_term, ccw) in extraction order
    remaining = terms[:]
    while remaining:
        n = len(remaining)
        for i in range(n):
            a, b = remaining[i], remaining[(i + 1) % n]
            if a[1] != b[1]:
                break
        else:
            raise CardinalityMismatchError("terminals cannot be paired")
        # arc over the gap from a to b (ccw, by increasing offset)
        if a[1] == "in":
            pairs.append((a, b, True))
        else:
            pairs.append((b, a, False))
        del remaining[max(i, (i + 1) % n)]
        del remaining[min(i, (i + 1) % n)]

    out: list[tuple[Cell, Cell, list[Cell]]] = []
    used: set[Cell] = set()
    for i, (tin, tout, ccw_from_in) in enumerate(pairs):
        p = base + i
        ring = _ring_cells(rect, p)
        stub_in = _stub(rect, tin[2], tin[3], p)
        stub_out = _stub(rect, tout[2], tout[3], p)
        a = ring.index(stub_in[-1])
        b = ring.index(stub_out[-1])
        arc = []
        k = a
        while True:
            arc.append(ring[k])
            if k == b:
                break
            k = (k + 1) % len(ring) if ccw_from_in else (k - 1) % len(ring)
        path = stub_in + arc[1:] + list(reversed(stub_out))[1:]
        if len(set(path)) != len(path) or used & set(path):
            raise TileTooSmallError("tunnel paths intersect")
        used.update(path)
        out.append((tin[2], tout[2], path))
    return out


# ---------------------------------------------------------------------------
# sequence planning


@dataclass
class _EdgePlan:
    """Layout of one directed tile edge within a sequence."""

    src: Tile
    dst: Tile
    counts: list[int]          # robots crossing per subflow index
    slots: list[Cell]          # boundary-adjacent out cells in src, per slot
    in_cells: list[Cell]       # receiving cells in dst, per slot (opposite)
    inward: tuple[int, int]    # unit vector from the side into src

    def queue_cell(self, slot: int, depth: int) -> Cell:
        x, y = self.slots[slot]
        return (x + self.inward[0] * (depth - 1), y + self.inward[1] * (depth - 1))


def _layout_edges(weights: list[dict[Edge, int]], tiling: Tiling) -> dict[Edge, _EdgePlan]:
    """Slot positions for every directed edge used by the sequence.

    Each shared tile side hosts two directions; the lexicographically
    smaller source gets the slots below/left of the side midpoint so the
    two blocks never overlap.
    """
    edges = sorted({e for wmap in weights for e in wmap})
    plans: dict[Edge, _EdgePlan] = {}
    for a, b in edges:
        counts = [wmap.get((a, b), 0) for wmap in weights]
        n = max(counts)
        ax0, ay0, aw, ah = tiling.tile_rect(a)
        bx0, by0, bw, bh = tiling.tile_rect(b)
        di, dj = b[0] - a[0], b[1] - a[1]
        assert abs(di) + abs(dj) == 1
        low_block = a < b
        slots, in_cells = [], []
        if dj == 0:  # vertical side, slots are rows
            mid = ay0 + ah // 2
            rows = [mid - 1 - k for k in range(n)] if low_block else [mid + k for k in range(n)]
            sx = ax0 + aw - 1 if di > 0 else ax0
            tx = bx0 if di > 0 else bx0 + bw - 1
            slots = [(sx, r) for r in rows]
            in_cells = [(tx, r) for r in rows]
            inward = (-di, 0)
        else:  # horizontal side, slots are columns
            mid = ax0 + aw // 2
            cols = [mid - 1 - k for k in range(n)] if low_block else [mid + k for k in range(n)]
            sy = ay0 + ah - 1 if dj > 0 else ay0
            ty = by0 if dj > 0 else by0 + bh - 1
            slots = [(c, sy) for c in cols]
            in_cells = [(c, ty) for c in cols]
            inward = (0, -dj)
        plans[(a, b)] = _EdgePlan(a, b, counts, slots, in_cells, inward)
    return plans


def _reroute_diagonals(subflows: list[Subflow], load: dict[Tile, int]
                       ) -> tuple[list[dict[Edge, int]],
                                  list[tuple[Tile, Tile, Tile, int, int]]]:
    """Replace diagonal edges by two orthogonal hops through a corner tile.

    Returns per-subflow orthogonal weight maps plus exchange jobs
    (w, v, u, count, subflow index): count robots sitting in w with target
    tile v must be physically exchanged into u beforehand; their exchange
    partners from u travel the added (w, u) flow.
    """
    maps: list[dict[Edge, int]] = []
    jobs: list[tuple[Tile, Tile, Tile, int, int]] = []
    for j, sub in enumerate(subflows):
        wmap: dict[Edge, int] = {}
        for (v, w), f in sub.edge_weights().items():
            if abs(v[0] - w[0]) + abs(v[1] - w[1]) == 1:
                wmap[(v, w)] = wmap.get((v, w), 0) + f
                continue
            corners = [(v[0], w[1]), (w[0], v[1])]
            u = min(corners, key=lambda c: (load.get(c, 0), c))
            load[u] = load.get(u, 0) + f
            jobs.append((v, w, u, f, j))
            wmap[(v, u)] = wmap.get((v, u), 0) + f   # displaced partners
            wmap[(u, w)] = wmap.get((u, w), 0) + f   # rerouted diagonal robots
        maps.append(wmap)
    return maps, jobs


def _plan_tunnels(weights: list[dict[Edge, int]], plans: dict[Edge, _EdgePlan],
                  tiling: Tiling) -> list[dict[Tile, list[tuple[Edge, int, list[Cell]]]]]:
    """Pure geometric dry run of every realization step.

    Returns, per step, per tile: the full tunnel cell path of each crossing
    (receiving edge, receiving slot, path ending at an outgoing front cell).
    Raises TileTooSmall before anything has moved if a tile cannot host its
    tunnels.
    """
    ell = len(weights)
    base = ell + 2
    qlen = {(e, k): sum(1 for c in plan.counts if c > k)
            for e, plan in plans.items() for k in range(len(plan.slots))}
    steps = []
    for j in range(ell):
        per_tile: dict[Tile, list] = {}
        tiles = sorted({t for e, f in weights[j].items() if f for t in e})
        for t in tiles:
            rect = tiling.tile_rect(t)
            ins = []   # (edge, slot, in_cell)
            outs = []  # (edge, slot, back_cell)
            for e, plan in plans.items():
                f = plan.counts[j]
                if not f:
                    continue
                if e[1] == t:
                    for k in range(f):
                        ins.append((e, k, plan.in_cells[k]))
                if e[0] == t:
                    for k in range(f):
                        outs.append((e, k, plan.queue_cell(k, qlen[(e, k)])))
            if not ins and not outs:
                continue
            matched = boundary_matching(rect, [c for _, _, c in ins],
                                        [c for _, _, c in outs], base)
            by_in = {c: (e, k) for e, k, c in ins}
            by_out = {c: (e, k) for e, k, c in outs}
            tunnels = []
            for cin, cout, path in matched:
                out_e, out_k = by_out[cout]
                plan = plans[out_e]
                q = qlen[(out_e, out_k)]
                full = path + [plan.queue_cell(out_k, depth)
                               for depth in range(q - 1, 0, -1)]
                tunnels.append((by_in[cin], (out_e, out_k), full))
            # safety: tunnels of one tile and step must be vertex-disjoint
            allcells = [c for _, _, p in tunnels for c in p]
            if len(set(allcells)) != len(allcells):
                raise TileTooSmallError(f"tunnel collision in tile {t}")
            per_tile[t] = tunnels
        for e, plan in plans.items():
            for k in range(plan.counts[j]):
                qlen[(e, k)] -= 1
        steps.append(per_tile)
    return steps


# ---------------------------------------------------------------------------
# committing a plan to robot motion


def _tile_robots(placement: dict[int, Cell], tiling: Tiling, tile: Tile) -> list[int]:
    x0, y0, w, h = tiling.tile_rect(tile)
    return sorted(r for r, (x, y) in placement.items()
                  if x0 <= x < x0 + w and y0 <= y < y0 + h)


def _exchange(placement: dict[int, Cell], rect: Rect,
              pairs: list[tuple[int, int]]) -> Schedule:
    x0, y0, w, h = rect
    tgt = {r: c for r, c in placement.items()
           if x0 <= c[0] < x0 + w and y0 <= c[1] < y0 + h}
    for a, b in pairs:
        tgt[a], tgt[b] = placement[b], placement[a]
    sched, pos = route_region(placement, tgt, rect)
    placement.update(pos)
    return sched


def _union_rect(tiling: Tiling, tiles: list[Tile]) -> Rect:
    rects = [tiling.tile_rect(t) for t in tiles]
    x0 = min(r[0] for r in rects)
    y0 = min(r[1] for r in rects)
    x1 = max(r[0] + r[2] for r in rects)
    y1 = max(r[1] + r[3] for r in rects)
    return (x0, y0, x1 - x0, y1 - y0)


def _commit_exchanges(placement: dict[int, Cell], target: dict[int, Cell],
                      tiling: Tiling,
                      jobs: list[tuple[Tile, Tile, Tile, int, int]]) -> Schedule:
    """Move diagonal-edge robots into their corner tiles, in rounds of
    tile-disjoint two-tile exchanges."""
    merged: dict[tuple[Tile, Tile], int] = {}
    for w_, v, u, f, _ in jobs:
        merged[(w_, v, u)] = merged.get((w_, v, u), 0) + f

    rounds: list[tuple[set[Tile], list[tuple[Tile, Tile, Tile, int]]]] = []
    for (w_, v, u), f in sorted(merged.items()):
        for tiles_used, batch in rounds:
            if w_ not in tiles_used and u not in tiles_used:
                tiles_used.update((w_, u))
                batch.append((w_, v, u, f))
                break
        else:
            rounds.append(({w_, u}, [(w_, v, u, f)]))

    schedule: Schedule = []
    for _, batch in rounds:
        parts = []
        for w_, v, u, f in batch:
            movers = [r for r in _tile_robots(placement, tiling, w_)
                      if tiling.tile_of(target[r]) == v][:f]
            stays = [r for r in _tile_robots(placement, tiling, u)
                     if tiling.tile_of(target[r]) == u][:f]
            if len(movers) < f or len(stays) < f:
                raise CardinalityMismatchError("not enough robots for diagonal exchange")
            parts.append(_exchange(placement, _union_rect(tiling, [w_, u]),
                                   list(zip(movers, stays))))
        schedule.extend(merge_parallel(parts))
    return schedule


def _commit_stacking(placement: dict[int, Cell], target: dict[int, Cell],
                     tiling: Tiling, plans: dict[Edge, _EdgePlan]
                     ) -> tuple[Schedule, dict[tuple[Edge, int, int], int]]:
    """Select crossing robots and park them in their stack cells via
    parallel in-tile permutations.  Returns the schedule and the robot
    assigned to each (edge, subflow, slot)."""
    assigned: dict[tuple[Edge, int, int], int] = {}
    wanted: dict[Tile, dict[int, Cell]] = {}
    taken: set[int] = set()
    for e in sorted(plans):
        plan = plans[e]
        src, dst = e
        candidates = [r for r in _tile_robots(placement, tiling, src)
                      if tiling.tile_of(target[r]) == dst and r not in taken]
        idx = 0
        for j, f in enumerate(plan.counts):
            for k in range(f):
                if idx >= len(candidates):
                    raise CardinalityMismatchError(
                        f"tile {src} lacks robots bound for {dst}")
                r = candidates[idx]
                idx += 1
                taken.add(r)
                depth = sum(1 for j2 in range(j + 1) if plan.counts[j2] > k)
                assigned[(e, j, k)] = r
                wanted.setdefault(src, {})[r] = plan.queue_cell(k, depth)

    parts = []
    for tile in sorted(wanted):
        rect = tiling.tile_rect(tile)
        robots = _tile_robots(placement, tiling, tile)
        goal = dict(wanted[tile])
        used_cells = set(goal.values())
        if len(used_cells) != len(goal):
            raise TileTooSmallError(f"stack cells collide in tile {tile}")
        free_robots = [r for r in robots if r not in goal]
        keep = [r for r in free_robots if placement[r] not in used_cells]
        displaced = [r for r in free_robots if placement[r] in used_cells]
        for r in keep:
            goal[r] = placement[r]
        free_cells = sorted({placement[r] for r in robots} - set(goal.values()))
        for r, c in zip(displaced, free_cells):
            goal[r] = c
        sched, pos = route_region(placement, goal, rect)
        placement.update(pos)
        parts.append(sched)
    return (merge_parallel(parts) if parts else []), assigned


DIR_OF = {(0, 1): "N", (1, 0): "E", (0, -1): "S", (-1, 0): "W"}


def _commit_steps(placement: dict[int, Cell], dims,
                  steps_plan: list[dict[Tile, list]], plans: dict[Edge, _EdgePlan],
                  assigned: dict[tuple[Edge, int, int], int]) -> Schedule:
    """Emit the realization steps; every tunnel occupant advances one cell
    and every stack front crosses into its target tile."""
    occ = {c: r for r, c in placement.items()}
    schedule: Schedule = []
    for j, per_tile in enumerate(steps_plan):
        step: Step = {}
        for t in sorted(per_tile):
            for (in_e, in_k), (out_e, out_k), full in per_tile[t]:
                front = full[-1]
                r = occ[front]
                assert r == assigned[(out_e, j, out_k)], "stack front out of order"
                step[r] = DIR_OF[(plans[out_e].in_cells[out_k][0] - front[0],
                                  plans[out_e].in_cells[out_k][1] - front[1])]
                for i in range(len(full) - 1):
                    a, b = full[i], full[i + 1]
                    step[occ[a]] = DIR_OF[(b[0] - a[0], b[1] - a[1])]
        new_placement = apply_step(dims, placement, step)
        placement.clear()
        placement.update(new_placement)
        occ = {c: r for r, c in placement.items()}
        schedule.append(step)
    return schedule


# ---------------------------------------------------------------------------
# public operations


def eliminate_diagonals(config: Configuration, subflow: Subflow, tiling: Tiling,
                        target: dict[int, Cell]) -> tuple[Schedule, Subflow]:
    """Replace every diagonal subflow edge by two orthogonal hops.

    The subflow's diagonal robots are physically exchanged into the chosen
    corner tile against robots of that tile that stay put; the displaced
    partners carry the new (source, corner) flow back, so the returned
    orthogonal subflow is still a circulation.
    """
    maps, jobs = _reroute_diagonals([subflow], {})
    placement = dict(config.placement)
    schedule = _commit_exchanges(placement, target, tiling, jobs)
    cycles: list[tuple[Cycle, int]] = []
    residual = dict(maps[0])
    # re-express the orthogonal weight map as cycles for downstream use
    from .flowpart import decompose_cycles
    from .tiling import FlowGraph
    for cyc, m in decompose_cycles(FlowGraph(tiling, residual)):
        cycles.append((cyc, m))
    return schedule, Subflow(cycles)


def realize_sequence(config: Configuration, subflows: list[Subflow],
                     tiling: Tiling, target: dict[int, Cell],
                     max_subflows: int | None = None) -> Schedule:
    """Realize a sequence of subflows: O(d) preprocessing plus one
    transformation step per subflow."""
    ell = len(subflows)
    if max_subflows is not None and ell > max_subflows:
        raise TooManySubflowsError(f"{ell} subflows exceed the limit {max_subflows}")
    if not subflows:
        return []
    load: dict[Tile, int] = {}
    weights, jobs = _reroute_diagonals(subflows, load)
    if not any(weights):
        return []
    plans = _layout_edges(weights, tiling)
    steps_plan = _plan_tunnels(weights, plans, tiling)  # may raise TileTooSmall

    placement = dict(config.placement)
    schedule = _commit_exchanges(placement, target, tiling, jobs)
    stack_sched, assigned = _commit_stacking(placement, target, tiling, plans)
    schedule.extend(stack_sched)
    schedule.extend(_commit_steps(placement, config.dims, steps_plan, plans, assigned))
    return schedule


def realize_subflow(config: Configuration, subflow: Subflow, tiling: Tiling,
                    target: dict[int, Cell]) -> Schedule:
    return realize_sequence(config, [subflow], tiling, target)


def _split_subflow(sub: Subflow) -> tuple[Subflow, Subflow]:
    items = sub.cycles
    if len(items) > 1:
        mid = len(items) // 2
        return Subflow(items[:mid]), Subflow(items[mid:])
    cyc, m = items[0]
    if m < 2:
        raise TileTooSmallError("cannot split a single weight-1 cycle further")
    return Subflow([(cyc, m // 2)]), Subflow([(cyc, m - m // 2)])


def realize_all(config: Configuration, partition: SubflowPartition, tiling: Tiling,
                target: dict[int, Cell]) -> Schedule:
    """Realize a whole partition; afterwards every robot occupies its
    target tile.  Sequences that cannot host their tunnels are split and
    retried (guaranteed to terminate: a single weight-1 cycle always fits).
    """
    d = tiling.d
    queue: list[list[Subflow]] = [
        [s for s in partition[i:i + d] if s.cycles]
        for i in range(0, len(partition), d)
    ]
    queue = [seq for seq in queue if seq]
    placement = dict(config.placement)
    schedule: Schedule = []
    while queue:
        seq = queue.pop(0)
        cfg = Configuration(config.dims, placement)
        try:
            part = realize_sequence(cfg, seq, tiling, target, d)
        except TileTooSmallError:
            if len(seq) > 1:
                mid = len(seq) // 2
                queue.insert(0, seq[mid:])
                queue.insert(0, seq[:mid])
            else:
                a, b = _split_subflow(seq[0])
                queue.insert(0, [b])
                queue.insert(0, [a])
            continue
        for step in part:
            placement = apply_step(config.dims, placement, step)
        schedule.extend(part)

    for r, c in placement.items():
        if tiling.tile_of(c) != tiling.tile_of(target[r]):
            raise ScheduleError(f"robot {r} missed its target tile")
    return schedule

"""Permutation routing on fully occupied rectangles.

Building blocks:

* ``solve_small``  -- optimal schedules for any permutation of a fully
  occupied 2x3 / 3x2 block, from a precomputed BFS table over all 720
  states.  The only legal primitive moves in such a block are rotations of
  its three fully occupied cycles (two unit squares and the boundary ring).
* ``swap_batch``   -- realizes a set of pairwise disjoint adjacent
  transpositions in O(1) steps by covering them with disjoint blocks.
* ``plan_rotatesort`` -- routes an arbitrary permutation of an n1 x n2
  rectangle in O(n1 + n2) comparator phases (column / row / column), each
  phase a run of odd-even transposition rounds realized via swap_batch.

The column-row-column decomposition assigns intermediate rows through a
proper edge coloring of the bipartite column-to-column transfer multigraph
(degree n2, hence n2 colors suffice), which guarantees: distinct
intermediate rows per column, distinct destination columns per row, and
distinct destination rows per column.  Each phase therefore sorts by a key
that is a permutation, and odd-even transposition needs at most as many
rounds as the line length.
"""
from __future__ import annotations

from functools import lru_cache

from .grid import (
    Cell,
    GridDims,
    InfeasibleError,
    Instance,
    NotFullyOccupiedError,
    Schedule,
    Step,
    move_towards,
)

Rect = tuple[int, int, int, int]  # x0, y0, width, height


# ---------------------------------------------------------------------------
# small blocks


def _block_cells(w: int, h: int) -> list[Cell]:
    return [(x, y) for y in range(h) for x in range(w)]


def _block_rotations(w: int, h: int) -> list[tuple[int, ...]]:
    """All primitive moves of a fully occupied w x h (=6 cells) block.

    Each move is a permutation rho over cell indices: the occupant of cell i
    moves to cell rho[i].  Legal moves are single-cycle rotations: the two
    unit squares and the boundary ring, each in both directions.
    """
    cells = _block_cells(w, h)
    index = {c: i for i, c in enumerate(cells)}
    cycles: list[list[Cell]] = []
    for x in range(w - 1):
        for y in range(h - 1):
            cycles.append([(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)])
    # boundary ring (covers all 6 cells for 2x3 / 3x2)
    ring: list[Cell] = []
    for x in range(w):
        ring.append((x, 0))
    for y in range(1, h):
        ring.append((w - 1, y))
    for x in range(w - 2, -1, -1):
        ring.append((x, h - 1))
    for y in range(h - 2, 0, -1):
        ring.append((0, y))
    cycles.append(ring)
    rotations = []
    for cyc in cycles:
        for direction in (1, -1):
            rho = list(range(len(cells)))
            k = len(cyc)
            for i, cell in enumerate(cyc):
                rho[index[cell]] = index[cyc[(i + direction) % k]]
            rotations.append(tuple(rho))
    return rotations


@lru_cache(maxsize=None)
def _bfs_table(w: int, h: int) -> dict[tuple[int, ...], list[tuple[int, ...]]]:
    """perm -> shortest move sequence taking the identity block state to it.

    A block state s is the tuple with s[i] = label of the robot on cell i.
    Applying a rotation rho maps state s to s' with s'[rho[i]] = s[i]; the
    move sequence that turns the identity into P turns any s into s o P.
    """
    rotations = _block_rotations(w, h)
    identity = tuple(range(w * h))
    table: dict[tuple[int, ...], list[tuple[int, ...]]] = {identity: []}
    frontier = [identity]
    while frontier:
        nxt = []
        for state in frontier:
            seq = table[state]
            for rho in rotations:
                child = [0] * len(state)
                for i, r in enumerate(state):
                    child[rho[i]] = r
                child_t = tuple(child)
                if child_t not in table:
                    table[child_t] = seq + [rho]
                    nxt.append(child_t)
        frontier = nxt
    return table


def small_block_diameter(w: int = 3, h: int = 2) -> int:
    return max(len(seq) for seq in _bfs_table(w, h).values())


_DIR_OF = {(0, 1): "N", (1, 0): "E", (0, -1): "S", (-1, 0): "W"}


@lru_cache(maxsize=None)
def _local_steps(w: int, h: int, rel: tuple[int, ...]) -> tuple[tuple[tuple[int, str, int], ...], ...]:
    """Cell-index step templates realizing the relative permutation ``rel``.

    Each step is a tuple of (source index, direction, destination index);
    independent of labels, so it is shared across all solve_small queries
    with the same relative permutation.
    """
    cells = _block_cells(w, h)
    steps = []
    for rho in _bfs_table(w, h)[rel]:
        moves = []
        for i, j in enumerate(rho):
            if j != i:
                dx = cells[j][0] - cells[i][0]
                dy = cells[j][1] - cells[i][1]
                moves.append((i, _DIR_OF[(dx, dy)], j))
        steps.append(tuple(moves))
    return tuple(steps)


def solve_small(placement: dict[int, Cell], target: dict[int, Cell], rect: Rect) -> Schedule:
    """Optimal schedule permuting a fully occupied 6-cell block.

    ``placement``/``target`` give global coordinates for the six robots on
    the block; extra robots in the dicts are ignored.
    """
    x0, y0, w, h = rect
    if w * h != 6 or w < 2 or h < 2:
        raise ValueError(f"solve_small needs a 2x3 or 3x2 block, got {w}x{h}")
    cells = [(x0 + dx, y0 + dy) for dy in range(h) for dx in range(w)]
    cell_index = {c: i for i, c in enumerate(cells)}
    occ = {cell: r for r, cell in placement.items() if cell in cell_index}
    if len(occ) != 6:
        raise NotFullyOccupiedError(f"block {rect} is not fully occupied")
    start_state = tuple(occ[c] for c in cells)
    want: list[int] = [0] * 6
    for r in start_state:
        tcell = target[r]
        if tcell not in cell_index:
            raise ValueError(f"target of robot {r} leaves block {rect}")
        want[cell_index[tcell]] = r
    target_state = tuple(want)
    # relative permutation P with start o P = target
    pos_of = {r: i for i, r in enumerate(start_state)}
    rel = tuple(pos_of[r] for r in target_state)
    schedule: Schedule = []
    state = list(start_state)
    for moves in _local_steps(w, h, rel):
        step: Step = {}
        new_state = list(state)
        for i, d, j in moves:
            r = state[i]
            step[r] = d
            new_state[j] = r
        schedule.append(step)
        state = new_state
    return schedule


# ---------------------------------------------------------------------------
# batched disjoint swaps


def _containing_windows(lo: int, hi: int, span: int, bound_lo: int, bound_hi: int) -> list[int]:
    """Start offsets of length-``span`` windows inside bounds covering [lo, hi]."""
    starts = []
    for s in range(max(bound_lo, hi - span + 1), min(lo, bound_hi - span) + 1):
        starts.append(s)
    return starts


def _block_for_swap(a: Cell, b: Cell, bounds: Rect) -> tuple[Rect, tuple[int, int, int]]:
    """Pick a 6-cell block inside ``bounds`` covering the adjacent pair.

    Returns the block and its layer class (orientation, residue, residue):
    vertical pairs prefer 3-wide x 2-tall blocks whose rows are exactly the
    pair's rows; horizontal pairs the transpose.  Twelve classes arise from
    the block orientation and the start residues (mod 2 along the pair axis,
    mod 3 across it); near the boundary the window is clamped.
    """
    bx, by, bw, bh = bounds
    (ax, ay), (cx, cy) = a, b
    if ax == cx:  # vertical pair
        ylo = min(ay, cy)
        if bw >= 3:
            base = ax - (ax - bx) % 3
            xs = _containing_windows(ax, ax, 3, bx, bx + bw)
            x0 = base if base in xs else xs[0]
            return (x0, ylo, 3, 2), (0, ylo % 2, (ax - bx) % 3)
        if bh >= 3:
            ys = _containing_windows(ylo, ylo + 1, 3, by, by + bh)
            base = ylo - (ylo - by) % 3
            y0 = base if base in ys else ys[0]
            return (ax if ax + 2 <= bx + bw else ax - 1, y0, 2, 3), (1, (ax - bx) % 2, ylo % 3)
        raise InfeasibleError("no 6-cell block fits in the region")
    else:  # horizontal pair
        xlo = min(ax, cx)
        if bh >= 3:
            ys = _containing_windows(ay, ay, 3, by, by + bh)
            base = ay - (ay - by) % 3
            y0 = base if base in ys else ys[0]
            return (xlo, y0, 2, 3), (1, xlo % 2, (ay - by) % 3)
        if bw >= 3:
            xs = _containing_windows(xlo, xlo + 1, 3, bx, bx + bw)
            base = xlo - (xlo - bx) % 3
            x0 = base if base in xs else xs[0]
            y0r = ay if ay + 2 <= by + bh else ay - 1
            return (x0, y0r, 3, 2), (0, ay % 2, xlo % 3)
        raise InfeasibleError("no 6-cell block fits in the region")


def _rect_cells(rect: Rect) -> list[Cell]:
    x0, y0, w, h = rect
    return [(x, y) for y in range(y0, y0 + h) for x in range(x0, x0 + w)]


def swap_batch(placement: dict[int, Cell], swaps: list[tuple[Cell, Cell]],
               bounds: Rect) -> tuple[Schedule, dict[int, Cell]]:
    """Realize pairwise disjoint adjacent transpositions in O(1) steps.

    Swaps are covered by 6-cell blocks; blocks sharing no cell run in
    parallel, conflicting blocks are deferred to a later batch.  Blocks of
    the same layer class only collide where boundary clamping shifted them,
    so the number of batches stays bounded by a constant.
    """
    cells_seen: set[Cell] = set()
    for a, b in swaps:
        if a in cells_seen or b in cells_seen:
            raise ValueError("swap_batch requires pairwise disjoint pairs")
        cells_seen.update((a, b))
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise ValueError(f"cells {a} and {b} are not adjacent")

    occ = {cell: r for r, cell in placement.items()}
    jobs: list[tuple[tuple[int, int, int], Rect, tuple[Cell, Cell]]] = []
    for a, b in swaps:
        block, layer = _block_for_swap(a, b, bounds)
        jobs.append((layer, block, (a, b)))
    jobs.sort(key=lambda j: j[0])

    # greedy grouping into non-overlapping batches; blocks covering several
    # swaps of the same batch are merged.
    batches: list[dict[Rect, list[tuple[Cell, Cell]]]] = []
    batch_cells: list[set[Cell]] = []
    for layer, block, pair in jobs:
        bcells = set(_rect_cells(block))
        placed = False
        for i, used in enumerate(batch_cells):
            existing = batches[i].get(block)
            if existing is not None:
                existing.append(pair)
                placed = True
                break
            if not (used & bcells):
                batches[i][block] = [pair]
                used.update(bcells)
                placed = True
                break
        if not placed:
            batches.append({block: [pair]})
            batch_cells.append(set(bcells))

    schedule: Schedule = []
    new_placement = dict(placement)
    for batch in batches:
        parts: list[Schedule] = []
        for block, pairs in batch.items():
            local = {occ[c]: c for c in _rect_cells(block)}
            tgt = dict(local)
            for a, b in pairs:
                tgt[occ[a]], tgt[occ[b]] = b, a
            parts.append(solve_small(local, tgt, block))
        length = max(len(p) for p in parts)
        for i in range(length):
            step: Step = {}
            for p in parts:
                if i < len(p):
                    step.update(p[i])
            schedule.append(step)
        for block, pairs in batch.items():
            for a, b in pairs:
                ra, rb = occ[a], occ[b]
                occ[a], occ[b] = rb, ra
                new_placement[ra], new_placement[rb] = b, a
    return schedule, new_placement


# ---------------------------------------------------------------------------
# edge coloring (intermediate row assignment)


def _edge_coloring(n_left: int, n_colors: int, edges: list[tuple[int, int]]) -> list[int]:
    """Proper edge coloring of a bipartite multigraph with max degree
    ``n_colors`` using exactly ``n_colors`` colors (Koenig).

    ``edges[k] = (u, v)`` with u a left node in [0, n_left) and v a right
    node.  Returns a color per edge.
    """
    n_right = max((v for _, v in edges), default=-1) + 1
    # slot[u][c] = edge id using color c at node u (or -1)
    left = [[-1] * n_colors for _ in range(n_left)]
    right = [[-1] * n_colors for _ in range(n_right)]
    color = [-1] * len(edges)

    def free_color(slots: list[int]) -> int:
        for c, e in enumerate(slots):
            if e == -1:
                return c
        raise AssertionError("degree exceeds color budget")

    for k, (u, v) in enumerate(edges):
        cu = free_color(left[u])
        if right[v][cu] == -1:
            color[k] = cu
            left[u][cu] = k
            right[v][cu] = k
            continue
        cv = free_color(right[v])
        # The maximal cu/cv alternating path from v cannot reach u (every
        # left node on it is entered through a cu-colored edge and u has cu
        # free), so flipping it frees cu at v without breaking u.
        path: list[int] = []
        node, is_right, want = v, True, cu
        while True:
            slots = right[node] if is_right else left[node]
            e = slots[want]
            if e == -1:
                break
            path.append(e)
            eu, ev = edges[e]
            node, is_right = (eu, False) if is_right else (ev, True)
            want = cv if want == cu else cu
        for e in path:
            eu, ev = edges[e]
            for c in (cu, cv):
                if left[eu][c] == e:
                    left[eu][c] = -1
                if right[ev][c] == e:
                    right[ev][c] = -1
        for i, e in enumerate(path):
            newc = cv if (color[e] == cu) else cu
            color[e] = newc
            eu, ev = edges[e]
            left[eu][newc] = e
            right[ev][newc] = e
        color[k] = cu
        left[u][cu] = k
        right[v][cu] = k
    return color


# ---------------------------------------------------------------------------
# routing


def _oddeven_rounds(lines: list[list[int]]) -> list[list[tuple[int, int, int]]]:
    """Odd-even transposition rounds sorting each line's keys ascending.

    ``lines[i]`` is mutated to sorted order.  Returns, per round, the swaps
    as (line, lo_index, hi_index).  All lines progress in lockstep so each
    round's swaps are pairwise disjoint.
    """
    rounds: list[list[tuple[int, int, int]]] = []
    parity = 0
    idle = 0
    length = max((len(l) for l in lines), default=0)
    while idle < 2:
        swaps = []
        for li, line in enumerate(lines):
            for i in range(parity, len(line) - 1, 2):
                if line[i] > line[i + 1]:
                    line[i], line[i + 1] = line[i + 1], line[i]
                    swaps.append((li, i, i + 1))
        if swaps:
            rounds.append(swaps)
            idle = 0
        else:
            idle += 1
        parity ^= 1
        if len(rounds) > 2 * length + 4:
            raise AssertionError("odd-even transposition failed to converge")
    return rounds


def route_region(placement: dict[int, Cell], target: dict[int, Cell],
                 rect: Rect) -> tuple[Schedule, dict[int, Cell]]:
    """Route a full permutation of the rectangle ``rect``.

    Every cell of the rectangle must be occupied and the occupants' targets
    must stay inside it.  Returns the schedule plus the updated placement
    for the affected robots (in global coordinates).
    """
    x0, y0, w, h = rect
    cell_set = {(x, y) for x in range(x0, x0 + w) for y in range(y0, y0 + h)}
    robots = [r for r, c in placement.items() if c in cell_set]
    if len(robots) != w * h:
        raise NotFullyOccupiedError(f"region {rect} is not fully occupied")
    for r in robots:
        if target[r] not in cell_set:
            raise ValueError(f"target of robot {r} leaves region {rect}")
    if all(placement[r] == target[r] for r in robots):
        return [], {r: placement[r] for r in robots}
    if w < 2 or h < 2 or (w == 2 and h == 2):
        raise InfeasibleError(f"region of shape {w}x{h} admits no swaps")

    pos = {r: placement[r] for r in robots}
    schedule: Schedule = []

    def emit(rounds_swaps: list[list[tuple[Cell, Cell]]]) -> None:
        nonlocal pos
        for swaps in rounds_swaps:
            steps, pos = swap_batch(pos, swaps, rect)
            schedule.extend(steps)

    grid = [[0] * h for _ in range(w)]  # local (lx, ly) -> robot
    for r in robots:
        x, y = pos[r]
        grid[x - x0][y - y0] = r

    dest = {r: (target[r][0] - x0, target[r][1] - y0) for r in robots}

    # phase 1: send each robot to an intermediate row inside its column so
    # that every row afterwards holds one robot per destination column.
    edges = []
    robot_of_edge = []
    for lx in range(w):
        for ly in range(h):
            r = grid[lx][ly]
            edges.append((lx, dest[r][0]))
            robot_of_edge.append(r)
    colors = _edge_coloring(w, h, edges)
    inter_row = {robot_of_edge[k]: colors[k] for k in range(len(edges))}

    def sort_columns(key: dict[int, int]) -> None:
        lines = [[key[grid[lx][ly]] for ly in range(h)] for lx in range(w)]
        rounds = _oddeven_rounds(lines)
        out = []
        for rnd in rounds:
            swaps = []
            for lx, lo, hi in rnd:
                a, b = (x0 + lx, y0 + lo), (x0 + lx, y0 + hi)
                swaps.append((a, b))
                grid[lx][lo], grid[lx][hi] = grid[lx][hi], grid[lx][lo]
            out.append(swaps)
        emit(out)

    def sort_rows(key: dict[int, int]) -> None:
        lines = [[key[grid[lx][ly]] for lx in range(w)] for ly in range(h)]
        rounds = _oddeven_rounds(lines)
        out = []
        for rnd in rounds:
            swaps = []
            for ly, lo, hi in rnd:
                a, b = (x0 + lo, y0 + ly), (x0 + hi, y0 + ly)
                swaps.append((a, b))
                grid[lo][ly], grid[hi][ly] = grid[hi][ly], grid[lo][ly]
            out.append(swaps)
        emit(out)

    sort_columns(inter_row)
    sort_rows({r: dest[r][0] for r in robots})
    sort_columns({r: dest[r][1] for r in robots})

    for r in robots:
        assert pos[r] == target[r], f"routing failed for robot {r}"
    return schedule, pos


def plan_rotatesort(instance: Instance) -> Schedule:
    """Schedule an arbitrary permutation of a fully occupied grid.

    Length is O(n1 + n2): three sorting phases of at most max(n1, n2)
    odd-even rounds each, every round realized in O(1) steps.
    """
    if instance.is_trivial():
        return []
    dims = instance.dims
    if dims.infeasible():
        raise InfeasibleError(f"grid {dims.n1}x{dims.n2} admits no nontrivial schedule")
    if len(instance.start) != dims.cells:
        raise NotFullyOccupiedError("plan_rotatesort requires a fully occupied grid")
    schedule, _ = route_region(instance.start, instance.target, (0, 0, dims.n1, dims.n2))
    return schedule

"""Distance-dependent tiling of the grid and the tile-level flow graph.

The grid is cut into rectangular tiles with side lengths between 12d and
24d-1 (d = max robot distance).  Robot movement between tiles induces a
directed multigraph on the tiles whose weights form a circulation; two
preprocessing passes remove geometrically crossing diagonal edges and
antiparallel edge pairs while keeping every robot within O(d) of its
original cell.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

from .grid import (
    Cell,
    Configuration,
    GridDims,
    Instance,
    Schedule,
    ScheduleError,
    manhattan,
    merge_parallel,
)
from .rotatesort import Rect, route_region

Tile = tuple[int, int]
Edge = tuple[Tile, Tile]


class NonAdjacentTilesError(ScheduleError):
    def __init__(self, robot: int, src: Tile, dst: Tile):
        self.robot, self.src, self.dst = robot, src, dst
        super().__init__(f"robot {robot} moves between non-adjacent tiles {src} -> {dst}")


def _strips(n: int, step: int) -> list[int]:
    """Strip widths: cuts at multiples of ``step``, remainder merged into
    the last strip so every width lands in [step, 2*step-1]."""
    k = n // step
    if k <= 1:
        return [n]
    return [step] * (k - 1) + [n - step * (k - 1)]


@dataclass(frozen=True)
class Tiling:
    dims: GridDims
    d: int
    xs: tuple[int, ...]  # cut x-coordinates including 0 and n1
    ys: tuple[int, ...]

    @property
    def nx(self) -> int:
        return len(self.xs) - 1

    @property
    def ny(self) -> int:
        return len(self.ys) - 1

    def tiles(self) -> list[Tile]:
        return [(i, j) for j in range(self.ny) for i in range(self.nx)]

    def tile_rect(self, tile: Tile) -> Rect:
        i, j = tile
        x0, x1 = self.xs[i], self.xs[i + 1]
        y0, y1 = self.ys[j], self.ys[j + 1]
        return (x0, y0, x1 - x0, y1 - y0)

    def tile_of(self, cell: Cell) -> Tile:
        x, y = cell
        if not self.dims.contains(cell):
            raise ValueError(f"cell {cell} outside grid")
        return (bisect_right(self.xs, x) - 1, bisect_right(self.ys, y) - 1)


def build_tiling(dims: GridDims, d: int) -> Tiling:
    if d < 1:
        raise ValueError("d must be positive")
    step = 12 * d
    xs = [0]
    for w in _strips(dims.n1, step):
        xs.append(xs[-1] + w)
    ys = [0]
    for h in _strips(dims.n2, step):
        ys.append(ys[-1] + h)
    return Tiling(dims, d, tuple(xs), tuple(ys))


@dataclass
class FlowGraph:
    """Directed tile adjacency graph weighted by robot transfer counts."""

    tiling: Tiling
    edges: dict[Edge, int] = field(default_factory=dict)

    def weight(self, v: Tile, w: Tile) -> int:
        return self.edges.get((v, w), 0)

    def is_circulation(self) -> bool:
        balance: dict[Tile, int] = {}
        for (v, w), f in self.edges.items():
            balance[v] = balance.get(v, 0) - f
            balance[w] = balance.get(w, 0) + f
        return all(b == 0 for b in balance.values())

    def max_weight(self) -> int:
        return max(self.edges.values(), default=0)

    def has_antiparallel(self) -> bool:
        return any((w, v) in self.edges for (v, w) in self.edges)

    def crossing_pairs(self) -> list[tuple[Edge, Edge]]:
        """Pairs of geometrically crossing diagonal edges.

        Diagonal edges run between tile centers of diagonal neighbors, so
        two edges cross exactly when they are the two diagonals of the same
        2x2 tile quad.
        """
        out = []
        for i in range(self.tiling.nx - 1):
            for j in range(self.tiling.ny - 1):
                main = [e for e in (((i, j), (i + 1, j + 1)), ((i + 1, j + 1), (i, j)))
                        if e in self.edges]
                anti = [e for e in (((i + 1, j), (i, j + 1)), ((i, j + 1), (i + 1, j)))
                        if e in self.edges]
                if main and anti:
                    out.append((main[0], anti[0]))
        return out


def build_flow(instance: Instance, tiling: Tiling) -> FlowGraph:
    edges: dict[Edge, int] = {}
    for r in instance.robots:
        v = tiling.tile_of(instance.start[r])
        w = tiling.tile_of(instance.target[r])
        if v == w:
            continue
        if max(abs(v[0] - w[0]), abs(v[1] - w[1])) > 1:
            raise NonAdjacentTilesError(r, v, w)
        edges[(v, w)] = edges.get((v, w), 0) + 1
    return FlowGraph(tiling, edges)


def flow_to_dot(flow: FlowGraph) -> str:
    """Debug dump of a flow graph in DOT format."""
    lines = ["digraph flow {"]
    for i, j in flow.tiling.tiles():
        lines.append(f'  t{i}_{j} [label="({i},{j})"];')
    for (v, w), f in sorted(flow.edges.items()):
        lines.append(f"  t{v[0]}_{v[1]} -> t{w[0]}_{w[1]} [weight={f}, label={f}];")
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# preprocessing: exchanging robots between adjacent tiles


def _union_rect(tiling: Tiling, tiles: list[Tile]) -> Rect:
    rects = [tiling.tile_rect(t) for t in tiles]
    x0 = min(r[0] for r in rects)
    y0 = min(r[1] for r in rects)
    x1 = max(r[0] + r[2] for r in rects)
    y1 = max(r[1] + r[3] for r in rects)
    return (x0, y0, x1 - x0, y1 - y0)


def _exchange(placement: dict[int, Cell], rect: Rect,
              pairs: list[tuple[int, int]]) -> Schedule:
    """Exchange the positions of each robot pair inside ``rect`` in place."""
    x0, y0, w, h = rect
    tgt = {r: c for r, c in placement.items()
           if x0 <= c[0] < x0 + w and y0 <= c[1] < y0 + h}
    for a, b in pairs:
        tgt[a], tgt[b] = placement[b], placement[a]
    sched, pos = route_region(placement, tgt, rect)
    placement.update(pos)
    return sched


def _robots_in(placement: dict[int, Cell], tiling: Tiling, tile: Tile) -> list[int]:
    x0, y0, w, h = tiling.tile_rect(tile)
    return [r for r, (x, y) in placement.items()
            if x0 <= x < x0 + w and y0 <= y < y0 + h]


def _movers(placement: dict[int, Cell], target: dict[int, Cell],
            tiling: Tiling, v: Tile, w: Tile) -> list[int]:
    return sorted(r for r in _robots_in(placement, tiling, v)
                  if tiling.tile_of(target[r]) == w)


def _boundary_key(tiling: Tiling, other: Tile):
    """Sort key: distance from a cell to the side shared with ``other``."""
    x0, y0, w, h = tiling.tile_rect(other)
    cx0, cy0 = x0, y0
    cx1, cy1 = x0 + w - 1, y0 + h - 1

    def key(cell: Cell) -> int:
        x, y = cell
        dx = max(cx0 - x, 0, x - cx1)
        dy = max(cy0 - y, 0, y - cy1)
        return dx + dy

    return key


def remove_crossings(config: Configuration, flow: FlowGraph, tiling: Tiling,
                     target: dict[int, Cell]) -> tuple[Schedule, Configuration, FlowGraph]:
    """Eliminate geometrically crossing diagonal edge pairs.

    For each 2x2 tile quad with both diagonals present, the lighter
    geometric diagonal is removed: its robots are exchanged into the corner
    tile that shares a row with their source and a column with their
    destination, against robots of that tile that stay put.  The diagonal
    hop then becomes two orthogonal hops.  Quads are processed in four
    parity rounds so simultaneous exchanges touch disjoint tiles.
    """
    placement = dict(config.placement)
    jobs: dict[tuple[int, int], list[tuple[Tile, Tile]]] = {}
    for i in range(tiling.nx - 1):
        for j in range(tiling.ny - 1):
            main = (((i, j), (i + 1, j + 1)), ((i + 1, j + 1), (i, j)))
            anti = (((i + 1, j), (i, j + 1)), ((i, j + 1), (i + 1, j)))
            wt_main = sum(flow.weight(*e) for e in main)
            wt_anti = sum(flow.weight(*e) for e in anti)
            if wt_main and wt_anti:
                kill = main if wt_main <= wt_anti else anti
                jobs.setdefault((i % 2, j % 2), []).extend(
                    e for e in kill if flow.weight(*e))

    schedule: Schedule = []
    for parity in sorted(jobs):
        parts: list[Schedule] = []
        for v, w in jobs[parity]:
            movers = _movers(placement, target, tiling, v, w)
            if not movers:
                continue
            u = (w[0], v[1])  # corner: shares a row with v, a column with w
            bkey = _boundary_key(tiling, v)
            stays = sorted((r for r in _robots_in(placement, tiling, u)
                            if tiling.tile_of(target[r]) == u),
                           key=lambda r: (bkey(placement[r]), r))
            assert len(stays) >= len(movers), "not enough stationary robots in corner tile"
            rect = _union_rect(tiling, [v, u])
            parts.append(_exchange(placement, rect, list(zip(movers, stays))))
        if parts:
            schedule.extend(merge_parallel(parts))

    new_config = Configuration(config.dims, placement)
    new_flow = build_flow(Instance(config.dims, placement, target), tiling)
    assert not new_flow.crossing_pairs()
    return schedule, new_config, new_flow


def remove_bidirectional(config: Configuration, flow: FlowGraph, tiling: Tiling,
                         target: dict[int, Cell]) -> tuple[Schedule, Configuration, FlowGraph]:
    """Cancel antiparallel edge pairs by direct pairwise exchanges.

    For each pair (v,w),(w,v) with m = min weight, m robots headed v->w
    swap positions with m robots headed w->v; both groups land inside
    their target tiles, so both weights drop by m and the lighter edge
    vanishes.  Exchanges run in at most eight rounds grouped so that the
    rectangles of one round are disjoint.
    """
    placement = dict(config.placement)
    jobs: dict[tuple, list[tuple[Tile, Tile, int]]] = {}
    for (v, w), f in flow.edges.items():
        if v >= w or (w, v) not in flow.edges:
            continue
        m = min(f, flow.edges[(w, v)])
        di, dj = w[0] - v[0], w[1] - v[1]
        if dj == 0:
            group = ("h", v[0] % 2)
        elif di == 0:
            group = ("v", v[1] % 2)
        else:
            qi, qj = min(v[0], w[0]), min(v[1], w[1])
            group = ("d", qi % 2, qj % 2)
        jobs.setdefault(group, []).append((v, w, m))

    schedule: Schedule = []
    for group in sorted(jobs):
        parts: list[Schedule] = []
        for v, w, m in jobs[group]:
            fwd = sorted(_movers(placement, target, tiling, v, w),
                         key=lambda r: (_boundary_key(tiling, w)(placement[r]), r))[:m]
            bwd = sorted(_movers(placement, target, tiling, w, v),
                         key=lambda r: (_boundary_key(tiling, v)(placement[r]), r))[:m]
            assert len(fwd) == m and len(bwd) == m
            if group[0] == "d":
                qi, qj = min(v[0], w[0]), min(v[1], w[1])
                tiles = [(qi, qj), (qi + 1, qj), (qi, qj + 1), (qi + 1, qj + 1)]
            else:
                tiles = [v, w]
            rect = _union_rect(tiling, tiles)
            parts.append(_exchange(placement, rect, list(zip(fwd, bwd))))
        if parts:
            schedule.extend(merge_parallel(parts))

    new_config = Configuration(config.dims, placement)
    new_flow = build_flow(Instance(config.dims, placement, target), tiling)
    assert not new_flow.has_antiparallel()
    return schedule, new_config, new_flow

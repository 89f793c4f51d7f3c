"""Partition of a preprocessed tile flow into bounded-weight subflows.

The circulation is decomposed into simple cycles, grouped by orientation,
and each group's support region is peeled boundary-by-boundary.  An edge
stays on the peel boundary from its first appearance until its weight is
exhausted, so the peel iterations touching an edge are consecutive;
labeling each peeled cycle by its iteration index modulo 576d therefore
caps every label class's weight on any single edge at
576d^2 / 576d = d.  Each label class is a sum of cycles, hence itself a
circulation: a d-subflow.
"""
from __future__ import annotations

from dataclasses import dataclass

from .tiling import Edge, FlowGraph, Tile

Point = tuple[float, float]


class NotCirculationError(ValueError):
    pass


class NonSimpleInputError(ValueError):
    pass


@dataclass(frozen=True)
class Cycle:
    """Closed walk over tiles; ``nodes`` lists each visited tile once, the
    closing edge back to nodes[0] is implicit."""

    nodes: tuple[Tile, ...]

    def edges(self) -> list[Edge]:
        n = len(self.nodes)
        return [(self.nodes[k], self.nodes[(k + 1) % n]) for k in range(n)]

    def is_simple(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    def orientation(self) -> int:
        """+1 counterclockwise, -1 clockwise (shoelace sign)."""
        area2 = 0
        for (x1, y1), (x2, y2) in self.edges():
            area2 += x1 * y2 - x2 * y1
        if area2 == 0:
            raise ValueError("degenerate cycle")
        return 1 if area2 > 0 else -1


@dataclass
class Subflow:
    """Sum of whole cycles with multiplicity; always a circulation."""

    cycles: list[tuple[Cycle, int]]

    def edge_weights(self) -> dict[Edge, int]:
        out: dict[Edge, int] = {}
        for cycle, mult in self.cycles:
            for e in cycle.edges():
                out[e] = out.get(e, 0) + mult
        return out

    def max_weight(self) -> int:
        return max(self.edge_weights().values(), default=0)


SubflowPartition = list[Subflow]


def _check_circulation(edges: dict[Edge, int]) -> None:
    balance: dict[Tile, int] = {}
    for (v, w), f in edges.items():
        if f < 0:
            raise NotCirculationError(f"negative weight on {(v, w)}")
        balance[v] = balance.get(v, 0) - f
        balance[w] = balance.get(w, 0) + f
    if any(b != 0 for b in balance.values()):
        raise NotCirculationError("flow is not conserved at every tile")


def decompose_cycles(flow: FlowGraph) -> list[tuple[Cycle, int]]:
    """Greedy decomposition of a circulation into closed walks with counts."""
    _check_circulation(flow.edges)
    residual = {e: f for e, f in flow.edges.items() if f > 0}
    out: list[tuple[Cycle, int]] = []
    while residual:
        succ: dict[Tile, list[Tile]] = {}
        for v, w in residual:
            succ.setdefault(v, []).append(w)
        start = next(iter(residual))[0]
        path = [start]
        seen = {start: 0}
        while True:
            nxt = succ[path[-1]][0]
            if nxt in seen:
                nodes = tuple(path[seen[nxt]:])
                cyc = Cycle(nodes)
                mult = min(residual[e] for e in cyc.edges())
                out.append((cyc, mult))
                for e in cyc.edges():
                    residual[e] -= mult
                    if residual[e] == 0:
                        del residual[e]
                break
            seen[nxt] = len(path)
            path.append(nxt)
    return out


def split_self_intersections(cycle: Cycle) -> list[Cycle]:
    """Split a closed walk at repeated tiles into vertex-simple cycles."""
    out: list[Cycle] = []
    stack: list[Tile] = []
    index: dict[Tile, int] = {}
    for node in cycle.nodes:
        if node in index:
            i = index[node]
            loop = tuple(stack[i:])
            out.append(Cycle(loop))
            for n in loop[1:]:
                del index[n]
            del stack[i + 1:]
        else:
            index[node] = len(stack)
            stack.append(node)
    if stack:
        out.append(Cycle(tuple(stack)))
    return out


# ---------------------------------------------------------------------------
# peeling via winding numbers


def _winding(point: Point, edges: dict[Edge, int]) -> int:
    """Winding number at ``point`` of the weighted edge set (ccw positive),
    via signed crossings of the rightward horizontal ray."""
    px, py = point
    total = 0
    for ((x1, y1), (x2, y2)), f in edges.items():
        if y1 == y2:
            continue
        if y1 <= py < y2:
            sign = 1
        elif y2 <= py < y1:
            sign = -1
        else:
            continue
        t = (py - y1) / (y2 - y1)
        x = x1 + t * (x2 - x1)
        if x > px:
            total += sign * f
    return total


def _side_points(edge: Edge) -> tuple[Point, Point]:
    """Two sample points just left and right of the edge (in edge direction);
    offsets are exact binary fractions and never land on subdivision lines."""
    (x1, y1), (x2, y2) = edge
    mx, my = (x1 + x2) / 2, (y1 + y2) / 2
    dx, dy = x2 - x1, y2 - y1
    nx, ny = -dy / 4, dx / 4
    return (mx + nx, my + ny), (mx - nx, my - ny)


def peel(cycles: list[tuple[Cycle, int]], orientation: int
         ) -> tuple[list[tuple[Cycle, int, int]], list[tuple[Cycle, int, int]]]:
    """Iteratively peel the boundary of the region covered by the cycles.

    All input cycles must be simple and of the given orientation.  Returns
    (outer, holes): outer-boundary cycles keep the input orientation, hole
    boundaries have the opposite one.  Each entry is (cycle, start, count):
    the cycle is peeled at iterations start .. start+count-1.
    """
    for cyc, _ in cycles:
        if not cyc.is_simple():
            raise NonSimpleInputError(f"cycle {cyc.nodes} is not simple")
        if cyc.orientation() != orientation:
            raise ValueError("cycle orientation does not match the set")

    residual: dict[Edge, int] = {}
    for cyc, mult in cycles:
        for e in cyc.edges():
            residual[e] = residual.get(e, 0) + mult

    # normalized depth (>= 0 inside) at both side points of every edge
    points = {p for e in residual for p in _side_points(e)}
    depth = {p: orientation * _winding(p, residual) for p in points}
    assert all(v >= 0 for v in depth.values())

    outer: list[tuple[Cycle, int, int]] = []
    holes: list[tuple[Cycle, int, int]] = []
    iteration = 0
    while residual:
        boundary = []
        for e in residual:
            left, right = _side_points(e)
            if (depth[left] >= 1) != (depth[right] >= 1):
                boundary.append(e)
        assert boundary, "positive residual flow with empty region boundary"
        m = min(residual[e] for e in boundary)

        # pair boundary edges into closed walks, then split pinch points
        succ: dict[Tile, list[Tile]] = {}
        for v, w in boundary:
            succ.setdefault(v, []).append(w)
        for v in succ:
            succ[v].sort()
        visited = 0
        while visited < len(boundary):
            start = min(v for v in succ if succ[v])
            walk = [start]
            node = start
            while True:
                node2 = succ[node].pop()
                visited += 1
                if node2 == start:
                    break
                walk.append(node2)
                node = node2
            for cyc in split_self_intersections(Cycle(tuple(walk))):
                if cyc.orientation() == orientation:
                    outer.append((cyc, iteration, m))
                else:
                    holes.append((cyc, iteration, m))

        for e in boundary:
            residual[e] -= m
            if residual[e] == 0:
                del residual[e]
        for p in depth:
            if depth[p] >= 1:
                depth[p] -= m
        iteration += m
    return outer, holes


def _bucket_weight(cycles: list[tuple[Cycle, int]]) -> int:
    return Subflow(cycles).max_weight()


def _pack(groups: list[list[tuple[Cycle, int]]], d: int) -> SubflowPartition:
    """First-fit-decreasing merge of cycle groups into subflows, keeping
    every merged subflow's per-edge weight at most d.  Sums of circulations
    are circulations, so merging never breaks the subflow invariant; it
    only shortens the realization schedule."""
    bins: list[tuple[dict[Edge, int], list[tuple[Cycle, int]]]] = []
    for group in groups:
        weights = Subflow(group).edge_weights()
        for bin_weights, bin_cycles in bins:
            if all(bin_weights.get(e, 0) + f <= d for e, f in weights.items()):
                for e, f in weights.items():
                    bin_weights[e] = bin_weights.get(e, 0) + f
                bin_cycles.extend(group)
                break
        else:
            bins.append((dict(weights), list(group)))
    return [Subflow(cycles) for _, cycles in bins]


def partition_subflows(flow: FlowGraph, d: int) -> SubflowPartition:
    """Split a planar unidirectional circulation into at most 4*576d
    subflows of per-edge weight at most d, summing edgewise to the input."""
    if d < 1:
        raise ValueError("d must be positive")
    if flow.has_antiparallel():
        raise ValueError("flow has antiparallel edges; run preprocessing first")
    if flow.crossing_pairs():
        raise ValueError("flow has crossing edges; run preprocessing first")

    simple: dict[int, list[tuple[Cycle, int]]] = {1: [], -1: []}
    for cyc, mult in decompose_cycles(flow):
        for piece in split_self_intersections(cyc):
            simple[piece.orientation()].append((piece, mult))

    modulus = 576 * d
    buckets: dict[tuple[int, int, int], list[tuple[Cycle, int]]] = {}
    for orientation in (1, -1):
        if not simple[orientation]:
            continue
        for set_id, peeled in enumerate(peel(simple[orientation], orientation)):
            for cyc, start, count in peeled:
                # spread the `count` copies over iteration labels mod 576d
                base, extra = divmod(count, modulus)
                for r in range(min(count, modulus)):
                    label = (start + r) % modulus
                    c = base + (1 if r < extra else 0)
                    if c:
                        buckets.setdefault((orientation, set_id, label), []).append((cyc, c))

    partition = _pack(sorted(buckets.values(), key=_bucket_weight, reverse=True), d)

    total: dict[Edge, int] = {}
    for sub in partition:
        assert sub.max_weight() <= d, "subflow exceeds weight bound"
        for e, f in sub.edge_weights().items():
            total[e] = total.get(e, 0) + f
    assert total == {e: f for e, f in flow.edges.items() if f > 0}
    return partition

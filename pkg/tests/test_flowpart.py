import random

import pytest

from swarmplan.grid import GridDims
from swarmplan.tiling import FlowGraph, build_tiling
from swarmplan.flowpart import (
    Cycle,
    NonSimpleInputError,
    NotCirculationError,
    decompose_cycles,
    partition_subflows,
    peel,
    split_self_intersections,
)


def tiles_graph(m, edges):
    return FlowGraph(build_tiling(GridDims(12 * m, 12 * m), 1), edges)


def rect_cycle(x0, y0, w, h, ccw=True):
    path = []
    for x in range(x0, x0 + w):
        path.append((x, y0))
    for y in range(y0, y0 + h):
        path.append((x0 + w, y))
    for x in range(x0 + w, x0, -1):
        path.append((x, y0 + h))
    for y in range(y0 + h, y0, -1):
        path.append((x0, y))
    if not ccw:
        path.reverse()
    return Cycle(tuple(path))


def add_cycle(edges, cycle, f=1):
    for e in cycle.edges():
        edges[e] = edges.get(e, 0) + f


def edge_sum(cycles_with_mult):
    out = {}
    for c, m in cycles_with_mult:
        add_cycle(out, c, m)
    return out


def test_cycle_orientation():
    assert rect_cycle(0, 0, 2, 2).orientation() == 1
    assert rect_cycle(0, 0, 2, 2, ccw=False).orientation() == -1


def test_decompose_empty():
    assert decompose_cycles(tiles_graph(4, {})) == []


def test_decompose_single_cycle_weight_3():
    edges = {}
    add_cycle(edges, rect_cycle(0, 0, 1, 1), 3)
    out = decompose_cycles(tiles_graph(4, dict(edges)))
    assert edge_sum(out) == edges
    assert sum(m for _, m in out) == 3


def test_decompose_rejects_non_circulation():
    with pytest.raises(NotCirculationError):
        decompose_cycles(tiles_graph(4, {((0, 0), (1, 0)): 1}))


def test_decompose_random_circulations_sum_back():
    rng = random.Random(11)
    for _ in range(20):
        edges = {}
        for _ in range(rng.randint(1, 8)):
            c = rect_cycle(rng.randint(0, 3), rng.randint(0, 3),
                           rng.randint(1, 3), rng.randint(1, 3))
            add_cycle(edges, c, rng.randint(1, 4))
        out = decompose_cycles(tiles_graph(8, dict(edges)))
        assert edge_sum(out) == edges


def test_split_simple_cycle_unchanged():
    c = rect_cycle(0, 0, 2, 2)
    assert split_self_intersections(c) == [c]


def test_split_figure_eight():
    # two unit squares joined at (1, 1), traversed as one closed walk
    walk = Cycle(((0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (1, 2), (1, 1), (0, 1)))
    parts = split_self_intersections(walk)
    assert len(parts) == 2
    assert all(p.is_simple() for p in parts)
    assert edge_sum([(p, 1) for p in parts]) == edge_sum([(walk, 1)])


def test_split_random_walks():
    rng = random.Random(5)
    for _ in range(50):
        # random closed walk: concatenate rectangle cycles through a shared corner
        walk = []
        x, y = 2, 2
        for _ in range(rng.randint(1, 4)):
            w, h = rng.randint(1, 3), rng.randint(1, 3)
            c = rect_cycle(x, y, w, h)
            walk.extend(c.nodes)
        walk_c = Cycle(tuple(walk))
        parts = split_self_intersections(walk_c)
        assert all(p.is_simple() for p in parts)
        assert edge_sum([(p, 1) for p in parts]) == edge_sum([(walk_c, 1)])


def test_peel_disjoint_cycles_all_outer():
    cycles = [(rect_cycle(0, 0, 1, 1), 2), (rect_cycle(4, 4, 2, 1), 1)]
    outer, holes = peel(cycles, 1)
    assert holes == []
    assert edge_sum([(c, m) for c, _, m in outer]) == edge_sum(cycles)


def test_peel_annulus_emits_hole_boundary():
    # four overlapping bands around an empty 2x2 center: the union region is
    # an annulus, so peeling yields the outer square plus a hole boundary
    cycles = [
        (rect_cycle(0, 0, 4, 1), 1),  # bottom band
        (rect_cycle(0, 3, 4, 1), 1),  # top band
        (rect_cycle(0, 0, 1, 4), 1),  # left band
        (rect_cycle(3, 0, 1, 4), 1),  # right band
    ]
    outer, holes = peel(cycles, 1)
    assert holes, "expected a hole boundary"
    for c, _, _ in holes:
        assert c.orientation() == -1
    for c, _, _ in outer:
        assert c.orientation() == 1
    both = [(c, m) for c, _, m in outer + holes]
    assert edge_sum(both) == edge_sum(cycles)


def test_peel_rejects_non_simple():
    walk = Cycle(((0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (1, 2), (1, 1), (0, 1)))
    with pytest.raises(NonSimpleInputError):
        peel([(walk, 1)], 1)


def test_peel_iterations_bounded_by_max_weight():
    cycles = [(rect_cycle(0, 0, 2, 2), 5), (rect_cycle(1, 1, 2, 2), 3)]
    outer, holes = peel(cycles, 1)
    assert max(s + m for _, s, m in outer + holes) <= 8


def test_partition_single_cycle():
    edges = {}
    add_cycle(edges, rect_cycle(0, 0, 2, 1), 1)
    part = partition_subflows(tiles_graph(4, edges), 1)
    assert len(part) == 1
    assert part[0].edge_weights() == edges


def test_partition_nested_rings_weight_bound():
    # deeply nested weight-1 rings force many shared peel iterations
    edges = {}
    n_rings = 40
    m = 2 * n_rings + 2
    for k in range(n_rings):
        add_cycle(edges, rect_cycle(k, k, m - 1 - 2 * k, m - 1 - 2 * k))
    part = partition_subflows(tiles_graph(m + 1, edges), 1)
    for sub in part:
        assert sub.max_weight() <= 1
    total = {}
    for sub in part:
        for e, f in sub.edge_weights().items():
            total[e] = total.get(e, 0) + f
    assert total == edges


def test_partition_random_flows_sum_and_bound():
    rng = random.Random(23)
    for trial in range(10):
        edges = {}
        for _ in range(rng.randint(2, 10)):
            c = rect_cycle(rng.randint(0, 6), rng.randint(0, 6),
                           rng.randint(1, 4), rng.randint(1, 4),
                           ccw=rng.random() < 0.5)
            add_cycle(edges, c, rng.randint(1, 6))
        # cancel antiparallel pairs so the flow is unidirectional
        for v, w in list(edges):
            if (v, w) in edges and (w, v) in edges:
                m = min(edges[(v, w)], edges[(w, v)])
                for e in ((v, w), (w, v)):
                    edges[e] -= m
                    if not edges[e]:
                        del edges[e]
        if not edges:
            continue
        flow = tiles_graph(12, dict(edges))
        d = rng.randint(1, 3)
        part = partition_subflows(flow, d)
        assert len(part) <= 4 * 576 * d
        total = {}
        for sub in part:
            assert sub.max_weight() <= d
            for e, f in sub.edge_weights().items():
                total[e] = total.get(e, 0) + f
        assert total == edges

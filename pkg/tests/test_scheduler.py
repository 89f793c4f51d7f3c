import random

import pytest

from swarmplan.grid import (
    GridDims,
    InfeasibleError,
    Instance,
    NotFullyOccupiedError,
    apply_schedule,
    makespan,
    max_distance,
)
from swarmplan.scheduler import (
    CaseBoundsViolatedError,
    plan_auto,
    plan_full,
    plan_sparse,
)


def identity_instance(n1, n2):
    start = {i: c for i, c in enumerate((x, y) for x in range(n1) for y in range(n2))}
    return Instance(GridDims(n1, n2), start, dict(start))


def perm_instance(n1, n2, rounds, seed):
    rng = random.Random(seed)
    inst = identity_instance(n1, n2)
    pos = dict(inst.start)
    for _ in range(rounds):
        occ = {c: r for r, c in pos.items()}
        used = set()
        for _ in range(n1 * n2 // 4):
            x, y = rng.randrange(n1 - 1), rng.randrange(n2 - 1)
            quad = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
            if any(q in used for q in quad):
                continue
            used.update(quad)
            rs = [occ[q] for q in quad]
            for r, q in zip(rs, quad[1:] + quad[:1]):
                pos[r] = q
                occ[q] = r
    return Instance(GridDims(n1, n2), inst.start, pos)


def sparse_instance(n, N, dmax, seed):
    rng = random.Random(seed)
    cells = rng.sample([(x, y) for x in range(n) for y in range(n)], N)
    start = {i + 1: c for i, c in enumerate(cells)}
    target, used = {}, set()
    for r, (x, y) in start.items():
        while True:
            tx = max(0, min(n - 1, x + rng.randint(-dmax, dmax)))
            ty = max(0, min(n - 1, y + rng.randint(-dmax, dmax)))
            if (tx, ty) not in used:
                used.add((tx, ty))
                target[r] = (tx, ty)
                break
    return Instance(GridDims(n, n), start, target)


# ---------------------------------------------------------------------------
# plan_full


def test_plan_full_identity():
    assert plan_full(identity_instance(6, 6)) == []


def test_plan_full_small_grid():
    inst = perm_instance(26, 32, 1, 0)
    sched = plan_full(inst)
    apply_schedule(inst, sched)


def test_plan_full_tiled_grid():
    inst = perm_instance(52, 52, 2, 1)
    sched = plan_full(inst)
    apply_schedule(inst, sched)


def test_plan_full_infeasible_dims():
    inst = identity_instance(2, 2)
    swapped = {0: inst.start[3], 3: inst.start[0],
               1: inst.start[1], 2: inst.start[2]}
    with pytest.raises(InfeasibleError):
        plan_full(Instance(inst.dims, inst.start, swapped))


def test_plan_full_not_fully_occupied():
    inst = Instance(GridDims(5, 5), {1: (0, 0)}, {1: (3, 3)})
    with pytest.raises(NotFullyOccupiedError):
        plan_full(inst)


# ---------------------------------------------------------------------------
# plan_sparse


def test_sparse_single_robot_exact():
    inst = Instance(GridDims(40, 40), {1: (3, 5)}, {1: (15, 11)})
    sched = plan_sparse(inst)
    apply_schedule(inst, sched)
    assert makespan(sched) == max_distance(inst)


def test_sparse_case_bounds():
    inst = sparse_instance(20, 12, 3, 0)  # N > ceil(n1/4)
    with pytest.raises(CaseBoundsViolatedError):
        plan_sparse(inst)


@pytest.mark.parametrize("seed", range(5))
def test_sparse_random(seed):
    inst = sparse_instance(200, 10, 50, seed)
    sched = plan_sparse(inst)
    apply_schedule(inst, sched)
    assert makespan(sched) <= 4 * max_distance(inst)


def test_sparse_odd_dims():
    inst = Instance(GridDims(101, 75),
                    {1: (100, 74), 2: (100, 0), 3: (0, 74), 4: (50, 50)},
                    {1: (60, 30), 2: (0, 74), 3: (100, 0), 4: (50, 10)})
    sched = plan_sparse(inst)
    apply_schedule(inst, sched)


def test_sparse_horizontal_before_vertical():
    # starts already at odd distinct columns, targets at even ones, so the
    # middle stages dominate: after the last E/W move only N/S remain
    start = {1: (1, 5), 2: (7, 9), 3: (13, 3)}
    target = {1: (20, 10), 2: (26, 2), 3: (30, 12)}
    inst = Instance(GridDims(128, 32), start, target)
    sched = plan_sparse(inst)
    apply_schedule(inst, sched)
    last_horizontal = max(i for i, step in enumerate(sched)
                          if any(m in "EW" for m in step.values()))
    for step in sched[last_horizontal + 1:]:
        assert all(m in "NS" for m in step.values())


# ---------------------------------------------------------------------------
# plan_auto


def test_auto_dispatches_sparse():
    inst = sparse_instance(200, 10, 50, 11)
    assert plan_auto(inst) == plan_sparse(inst)


def test_auto_two_clusters():
    start, target = {}, {}
    rid = 1
    for ox, oy in [(2, 2), (40, 45)]:
        cells = [(ox + x, oy + y) for x in range(6) for y in range(6)]
        perm = cells[1:] + cells[:1]
        for c, t in zip(cells, perm):
            start[rid] = c
            target[rid] = t
            rid += 1
    inst = Instance(GridDims(60, 60), start, target)
    sched = plan_auto(inst)
    apply_schedule(inst, sched)
    # two independent 6x6 clusters: far cheaper than one global plan
    assert makespan(sched) <= 40 * max_distance(inst)


def test_auto_full_grid():
    inst = perm_instance(26, 26, 1, 5)
    sched = plan_auto(inst)
    apply_schedule(inst, sched)


def test_auto_tiny_cluster_inflation():
    # a 2-robot swap needs its 2x2 rectangle inflated to a feasible grid
    inst = Instance(GridDims(10, 10), {1: (4, 4), 2: (5, 5)},
                    {1: (5, 5), 2: (4, 4)})
    sched = plan_auto(inst)
    apply_schedule(inst, sched)


@pytest.mark.parametrize("seed", range(3))
def test_auto_mixed_random(seed):
    rng = random.Random(seed)
    n = 30
    inst = sparse_instance(n, 25, 4, seed)  # dense enough for clustering
    sched = plan_auto(inst)
    apply_schedule(inst, sched)

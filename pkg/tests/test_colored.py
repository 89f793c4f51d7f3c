"""Tests for color-level planning and bottleneck matching."""

import random
from itertools import permutations

import pytest

from swarmplan.colored import (
    DimsMismatchError,
    Image,
    IncompatibleError,
    SizeMismatchError,
    bottleneck_matching,
    check_compatible,
    image_of,
    induced_instance,
    matching_distance,
    plan_colored,
)
from swarmplan.grid import GridDims, apply_schedule


def _manhattan(a, b):
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def brute_bottleneck(a, b):
    best = None
    for perm in permutations(range(len(b))):
        val = max((_manhattan(a[i], b[j]) for i, j in enumerate(perm)), default=0)
        best = val if best is None else min(best, val)
    return best


# --- compatibility -------------------------------------------------------


def test_compatible_identity():
    img = Image(GridDims(4, 4), {(0, 0): 1, (1, 1): 2})
    assert check_compatible(img, img)


def test_compatible_recolor_false():
    a = Image(GridDims(4, 4), {(0, 0): 1, (1, 1): 2})
    b = Image(GridDims(4, 4), {(0, 0): 1, (1, 1): 1})
    assert not check_compatible(a, b)


def test_compatible_permuted_cells():
    rng = random.Random(7)
    cells = [(x, y) for x in range(6) for y in range(6)]
    colors = [rng.randint(1, 3) for _ in cells]
    a = Image(GridDims(6, 6), dict(zip(cells, colors)))
    shuffled = cells[:]
    rng.shuffle(shuffled)
    b = Image(GridDims(6, 6), dict(zip(shuffled, colors)))
    assert check_compatible(a, b)


def test_compatible_dims_mismatch():
    with pytest.raises(DimsMismatchError):
        check_compatible(Image(GridDims(4, 4)), Image(GridDims(4, 5)))


# --- bottleneck matching -------------------------------------------------


def test_bottleneck_identity():
    pts = [(0, 0), (3, 4), (7, 1)]
    match = bottleneck_matching(pts, pts)
    assert max(_manhattan(p, q) for p, q in match) == 0


def test_bottleneck_avoids_crossing():
    match = bottleneck_matching([(0, 0), (10, 0)], [(1, 0), (9, 0)])
    assert max(_manhattan(p, q) for p, q in match) == 1


def test_bottleneck_size_mismatch():
    with pytest.raises(SizeMismatchError):
        bottleneck_matching([(0, 0)], [])


@pytest.mark.parametrize("seed", range(20))
def test_bottleneck_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    a = [(rng.randint(0, 15), rng.randint(0, 15)) for _ in range(n)]
    b = [(rng.randint(0, 15), rng.randint(0, 15)) for _ in range(n)]
    match = bottleneck_matching(a, b)
    got = max((_manhattan(p, q) for p, q in match), default=0)
    assert got == brute_bottleneck(a, b)
    assert sorted(p for p, _ in match) == sorted(a)
    assert sorted(q for _, q in match) == sorted(b)


# --- colored planning ----------------------------------------------------


def test_plan_identity_empty():
    img = Image(GridDims(6, 6), {(x, y): 1 + (x + y) % 2 for x in range(6) for y in range(6)})
    assert plan_colored(img, img) == []


def test_plan_single_robot_near_distance():
    a = Image(GridDims(8, 8), {(0, 0): 1})
    b = Image(GridDims(8, 8), {(5, 4): 1})
    schedule = plan_colored(a, b)
    instance = induced_instance(a, b)
    apply_schedule(instance, schedule)
    # one real robot at distance 9 on an 8x8 grid; the fallback router
    # still stays within its linear bound
    assert len(schedule) <= 20 * 16


def test_incompatible_raises():
    a = Image(GridDims(4, 4), {(0, 0): 1})
    b = Image(GridDims(4, 4), {(0, 0): 1, (1, 1): 1})
    with pytest.raises(IncompatibleError):
        plan_colored(a, b)


@pytest.mark.parametrize("seed", range(3))
def test_plan_random_three_color(seed):
    rng = random.Random(seed)
    dims = GridDims(20, 20)
    cells = [(x, y) for x in range(20) for y in range(20)]
    colors = [rng.randint(1, 3) for _ in cells]
    a = Image(dims, dict(zip(cells, colors)))
    shuffled = cells[:]
    rng.shuffle(shuffled)
    b = Image(dims, dict(zip(shuffled, colors)))
    instance = induced_instance(a, b)
    schedule = plan_colored(a, b)
    final = apply_schedule(instance, schedule).placement
    robot_colors = {
        r: a.padded(4).cells[instance.start[r]] for r in instance.robots
    }
    assert image_of(instance, final, robot_colors).cells == b.padded(4).cells
    d = matching_distance(a, b)
    assert len(schedule) <= 20 * (dims.n1 + dims.n2) and d >= 1

"""Tests for the exhaustive oracle and the instance generators."""

import math
import random

import pytest

from swarmplan.grid import GridDims, Instance, apply_schedule, max_distance
from swarmplan.oracle import (
    BadArityError,
    BudgetExceededError,
    InfeasibleParamsError,
    NotMonotoneError,
    critical_makespan,
    gen_hex,
    gen_random,
    gen_sat_instance,
    optimal_makespan,
)


# --- exhaustive optimum ----------------------------------------------------


def test_optimal_identity_zero():
    inst = Instance(GridDims(3, 3), {0: (1, 1)}, {0: (1, 1)})
    assert optimal_makespan(inst) == 0


def test_optimal_single_robot_distance():
    inst = Instance(GridDims(3, 3), {0: (0, 0)}, {0: (2, 2)})
    assert optimal_makespan(inst) == 4


def test_optimal_fig8_transposition_is_three():
    # fully occupied 2x3 block, two adjacent robots exchanged
    cells = [(x, y) for x in range(2) for y in range(3)]
    start = dict(enumerate(cells))
    target = dict(start)
    target[0], target[1] = start[1], start[0]  # swap (0,0) and (0,1)
    inst = Instance(GridDims(2, 3), start, target)
    assert optimal_makespan(inst, max_robots=6) == 3


def test_optimal_cap_returns_unknown():
    inst = Instance(GridDims(3, 3), {0: (0, 0)}, {0: (2, 2)})
    assert optimal_makespan(inst, cap=3) is None


def test_optimal_budget_enforced():
    inst = Instance(GridDims(4, 4), {0: (0, 0)}, {0: (1, 1)})
    with pytest.raises(BudgetExceededError):
        optimal_makespan(inst)


# --- random generator ------------------------------------------------------


def test_gen_random_empty():
    inst = gen_random(GridDims(5, 5), 0, 3, seed=1)
    assert inst.robots == []


def test_gen_random_seed_stable():
    a = gen_random(GridDims(12, 9), 10, 4, seed=42)
    b = gen_random(GridDims(12, 9), 10, 4, seed=42)
    assert a.start == b.start and a.target == b.target


@pytest.mark.parametrize("seed", range(10))
def test_gen_random_distance_bound(seed):
    inst = gen_random(GridDims(15, 15), 20, 5, seed=seed)
    assert max_distance(inst) <= 5


@pytest.mark.parametrize("seed", range(10))
def test_gen_random_fully_occupied_permutation(seed):
    inst = gen_random(GridDims(10, 8), 0, 4, seed=seed, fully_occupied=True)
    assert len(inst.robots) == 80
    assert set(inst.start.values()) == set(inst.target.values())
    assert max_distance(inst) <= 4


def test_gen_random_too_many_robots():
    with pytest.raises(InfeasibleParamsError):
        gen_random(GridDims(2, 2), 5, 1, seed=0)


# --- hardness construction -------------------------------------------------


def test_critical_makespan_formula():
    assert critical_makespan(1, 1) == 18
    assert critical_makespan(3, 2) == 72


def test_sat_rejects_mixed_clause():
    with pytest.raises(NotMonotoneError):
        gen_sat_instance([[1, -2, 3]], 3)


def test_sat_rejects_bad_arity():
    with pytest.raises(BadArityError):
        gen_sat_instance([[1, 2]], 3)
    with pytest.raises(BadArityError):
        gen_sat_instance([[1, 1, 2]], 3)


def test_sat_three_colors():
    _, _, _, colors = gen_sat_instance([[1, 2, 3]], 3)
    assert set(colors.values()) <= {1, 2, 3}


def test_sat_witness_validates_positive_clause():
    inst, M, witness, _ = gen_sat_instance(
        [[1, 2, 3]], 3, assignment=[True, False, False]
    )
    assert M == 6 * 3 * 3
    assert len(witness) == M
    final = apply_schedule(inst, witness)
    assert final.placement == inst.target


def test_sat_witness_validates_negative_clause():
    inst, M, witness, _ = gen_sat_instance(
        [[-1, -2, -3]], 3, assignment=[True, True, False]
    )
    assert len(witness) == M
    apply_schedule(inst, witness)


@pytest.mark.parametrize("seed", range(5))
def test_sat_witness_random_formulas(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 5)
    m = rng.randint(1, 4)
    assignment = [rng.random() < 0.5 for _ in range(n)]
    formula = []
    for _ in range(m):
        vs = sorted(rng.sample(range(n), 3))
        # build a clause the assignment satisfies
        if any(assignment[v] for v in vs):
            formula.append([v + 1 for v in vs])
        else:
            formula.append([-(v + 1) for v in vs])
    inst, M, witness, colors = gen_sat_instance(formula, n, assignment=assignment)
    assert len(witness) == M
    apply_schedule(inst, witness)
    assert set(colors.values()) <= {1, 2, 3}


def test_sat_instance_without_assignment_has_no_witness():
    inst, M, witness, _ = gen_sat_instance([[1, 2, 3]], 3)
    assert witness is None
    assert M == 54 and len(inst.robots) > 0


# --- hex packing -----------------------------------------------------------


def test_hex_single_disk():
    inst = gen_hex(1)
    assert math.dist(inst.start[0], inst.target[0]) == 2.0


@pytest.mark.parametrize("n", [7, 19, 37])
def test_hex_packing_properties(n):
    inst = gen_hex(n)
    assert len(inst.robots) == n
    pts = list(inst.start.values())
    dists = [math.dist(p, q) for i, p in enumerate(pts) for q in pts[i + 1 :]]
    assert min(dists) >= 2.0 - 1e-9
    for r in inst.robots:
        d = math.dist(inst.start[r], inst.target[r])
        assert d == 0.0 or abs(d - 2.0) < 1e-9
    assert sorted(inst.start.values()) == sorted(inst.target.values())


def test_hex_rejects_non_hex_count():
    with pytest.raises(InfeasibleParamsError):
        gen_hex(10)

"""Tests for continuous disk planning and trajectory validation."""

import math
import random

import pytest

from swarmplan.continuous import (
    ContinuousInstance,
    SeparationViolatedError,
    TrajectorySet,
    plan_dense,
    plan_separated,
    validate_trajectories,
)

MESH = 2.0 * math.sqrt(2.0)


# --- validator ------------------------------------------------------------


def test_touching_stationary_compatible():
    ts = TrajectorySet({0: [(0.0, (0.0, 0.0)), (1.0, (0.0, 0.0))],
                        1: [(0.0, (2.0, 0.0)), (1.0, (2.0, 0.0))]})
    report = validate_trajectories(ts)
    assert report.compatible and abs(report.min_separation - 2.0) < 1e-12


def test_head_on_swap_violates_at_midpoint():
    ts = TrajectorySet({0: [(0.0, (0.0, 0.0)), (4.0, (4.0, 0.0))],
                        1: [(0.0, (4.0, 0.0)), (4.0, (0.0, 0.0))]})
    report = validate_trajectories(ts)
    assert not report.compatible
    (r, s, t, dist) = report.separation_violations[0]
    assert (r, s) == (0, 1) and abs(t - 2.0) < 1e-9 and dist < 1e-9


def test_speed_violation_detected():
    ts = TrajectorySet({0: [(0.0, (0.0, 0.0)), (1.0, (3.0, 0.0))]})
    report = validate_trajectories(ts)
    assert report.speed_violations and report.speed_violations[0][2] > 2.9


def test_endpoint_mismatch_detected():
    inst = ContinuousInstance({0: (0.0, 0.0)}, {0: (5.0, 0.0)})
    ts = TrajectorySet({0: [(0.0, (0.0, 0.0)), (4.0, (4.0, 0.0))]})
    report = validate_trajectories(ts, inst)
    assert not report.compatible and report.endpoint_errors


def test_incident_edge_touch_is_allowed():
    # perpendicular motions through adjacent mesh vertices meet exactly
    # at distance 2 at the midpoint of the move
    ts = TrajectorySet({
        0: [(0.0, (0.0, 0.0)), (MESH, (MESH, 0.0))],
        1: [(0.0, (MESH, 0.0)), (MESH, (MESH, MESH))],
    })
    report = validate_trajectories(ts)
    assert report.compatible
    assert abs(report.min_separation - 2.0) < 1e-9


# --- separated planner ----------------------------------------------------


def separated_instance(n, d, seed):
    rng = random.Random(seed)
    start, target = {}, {}
    placed_s, placed_t = [], []
    r = 0
    while r < n:
        s = (rng.uniform(0, 12 * n), rng.uniform(0, 12 * n))
        t = (s[0] + rng.uniform(-d, d), s[1] + rng.uniform(-d, d))
        if all(math.dist(s, p) >= 4.2 for p in placed_s) and all(
            math.dist(t, p) >= 4.2 for p in placed_t
        ):
            start[r], target[r] = s, t
            placed_s.append(s)
            placed_t.append(t)
            r += 1
    return ContinuousInstance(start, target)


def test_separated_stationary_snap_only():
    inst = ContinuousInstance(
        {0: (1.3, 2.2), 1: (9.0, 2.2)}, {0: (1.3, 2.2), 1: (9.0, 2.2)}
    )
    ts = plan_separated(inst)
    assert ts.makespan <= 4.0 + 1e-9
    assert validate_trajectories(ts, inst).compatible


def test_separated_two_robot_exchange():
    inst = ContinuousInstance(
        {0: (0.0, 0.0), 1: (20.0, 0.0)}, {0: (20.0, 0.0), 1: (0.0, 0.0)}
    )
    ts = plan_separated(inst)
    report = validate_trajectories(ts, inst)
    assert report.compatible, report.separation_violations[:3]


def test_separated_requires_separation():
    with pytest.raises(SeparationViolatedError):
        plan_separated(
            ContinuousInstance({0: (0.0, 0.0), 1: (3.0, 0.0)},
                               {0: (0.0, 10.0), 1: (3.0, 10.0)})
        )


@pytest.mark.parametrize("seed", range(4))
def test_separated_random_compatible(seed):
    inst = separated_instance(n=8, d=15.0, seed=seed)
    ts = plan_separated(inst)
    report = validate_trajectories(ts, inst)
    assert report.compatible, (report.endpoint_errors,
                               report.speed_violations[:3],
                               report.separation_violations[:3])
    d = max(inst.max_distance, 1.0)
    assert ts.makespan / d < 2000


# --- dense planner --------------------------------------------------------


def dense_instance(n, d, seed):
    rng = random.Random(seed)
    side = math.ceil(math.sqrt(n)) * 2.5
    start, target = {}, {}
    placed_s, placed_t = [], []
    r = 0
    while r < n:
        s = (rng.uniform(0, side), rng.uniform(0, side))
        t = (s[0] + rng.uniform(-d, d), s[1] + rng.uniform(-d, d))
        if all(math.dist(s, p) >= 2.05 for p in placed_s) and all(
            math.dist(t, p) >= 2.05 for p in placed_t
        ):
            start[r], target[r] = s, t
            placed_s.append(s)
            placed_t.append(t)
            r += 1
    return ContinuousInstance(start, target)


def test_dense_single_robot_straight_line():
    inst = ContinuousInstance({0: (1.0, 1.0)}, {0: (4.0, 5.0)})
    ts = plan_dense(inst)
    assert abs(ts.makespan - 5.0) < 1e-9
    assert len(ts.paths[0]) == 2
    assert validate_trajectories(ts, inst).compatible


@pytest.mark.parametrize("seed", range(3))
def test_dense_random_compatible(seed):
    inst = dense_instance(n=9, d=6.0, seed=seed)
    ts = plan_dense(inst)
    report = validate_trajectories(ts, inst)
    assert report.compatible, (report.endpoint_errors,
                               report.speed_violations[:3],
                               report.separation_violations[:3])
    n = len(inst.robots)
    bound = inst.max_distance + math.sqrt(n)
    assert ts.makespan / bound < 2000


def test_dense_touching_row():
    # a row of exactly touching disks shifted upward together
    start = {i: (2.0 * i, 0.0) for i in range(5)}
    target = {i: (2.0 * i, 7.0) for i in range(5)}
    inst = ContinuousInstance(start, target)
    ts = plan_dense(inst)
    report = validate_trajectories(ts, inst)
    assert report.compatible, (report.speed_violations[:3],
                               report.separation_violations[:3])

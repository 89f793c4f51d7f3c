#!/usr/bin/env python3
"""Measure the regression constants and rewrite swarmplan/regression.json.

The test suite treats the frozen values as regression bounds: it re-runs the
same deterministic corpora (see swarmplan.bench) and asserts the observed
maxima stay at or below the frozen ones.  Run this script only when an
algorithm change deliberately shifts a constant, then commit the new file.
"""
from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from swarmplan import bench
from swarmplan.continuous import plan_dense, plan_separated
from swarmplan.grid import apply_schedule, max_distance
from swarmplan.oracle import optimal_makespan
from swarmplan.rotatesort import plan_rotatesort
from swarmplan.scheduler import InfeasibleError, plan_auto, plan_full

OUT = Path(__file__).resolve().parent.parent / "src" / "swarmplan" / "regression.json"

# margin applied to every measured maximum before freezing; the corpora are
# seeded, so this only absorbs float jitter and platform differences
MARGIN = 1.05


def timed(label):
    start = time.time()

    def done(value):
        print(f"{label}: {value:.4f}  ({time.time() - start:.0f}s)")
        return value

    return done


def measure_full_stretch() -> float:
    done = timed("full_stretch_max")
    worst = 0.0
    for _, _, _, inst in bench.full_corpus():
        d = max_distance(inst)
        if d == 0:
            continue
        worst = max(worst, len(plan_full(inst)) / d)
    return done(worst)


def measure_auto_stretch() -> float:
    done = timed("auto_stretch_max")
    worst = 0.0
    for inst in bench.mixed_corpus(300):
        d = max_distance(inst)
        if d == 0:
            continue
        worst = max(worst, len(plan_auto(inst)) / d)
    return done(worst)


def measure_oracle_ratio() -> float:
    done = timed("oracle_ratio_max")
    worst = 1.0
    for inst in bench.tiny_corpus(2000):
        opt = optimal_makespan(inst)
        if opt is None or opt == 0:
            continue
        try:
            got = len(plan_auto(inst))
        except InfeasibleError:
            raise SystemExit(f"planner failed on solvable instance {inst}")
        worst = max(worst, got / opt)
    return done(worst)


def measure_rotatesort() -> float:
    done = timed("rotatesort_linearity_max")
    worst = 0.0
    for n in range(6, 61, 6):
        for seed in range(50):
            inst = bench.permutation_instance(n, n, seed)
            worst = max(worst, len(plan_rotatesort(inst)) / (2 * n))
    return done(worst)


def measure_separated() -> float:
    done = timed("separated_stretch_max")
    worst = 0.0
    for count in (25, 100):
        for seed in range(3):
            inst = bench.continuous_instance(count, seed, 4.0)
            traj = plan_separated(inst)
            d = max(math.dist(inst.start[r], inst.target[r]) for r in inst.start)
            worst = max(worst, traj.makespan / d)
    return done(worst)


def measure_dense() -> float:
    done = timed("dense_ratio_max")
    worst = 0.0
    for count, seeds in ((25, 3), (100, 3), (400, 2)):
        for seed in range(seeds):
            inst = bench.continuous_instance(count, seed, 2.0)
            traj = plan_dense(inst)
            d = max(math.dist(inst.start[r], inst.target[r]) for r in inst.start)
            worst = max(worst, traj.makespan / (d + math.sqrt(count)))
    return done(worst)


def main() -> None:
    constants = {
        "full_stretch_max": measure_full_stretch(),
        "auto_stretch_max": measure_auto_stretch(),
        "oracle_ratio_max": measure_oracle_ratio(),
        "rotatesort_linearity_max": measure_rotatesort(),
        "separated_stretch_max": measure_separated(),
        "dense_ratio_max": measure_dense(),
    }
    frozen = {k: round(v * MARGIN, 4) for k, v in constants.items()}
    doc = {"measured": constants, "frozen": frozen, "margin": MARGIN}
    OUT.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()

"""Deterministic benchmark corpora.

Instance samplers shared by ``scripts/measure_constants.py`` (which freezes
the regression bounds) and the regression tests (which re-run the same
corpora and compare against the frozen bounds).  Everything here is a pure
function of its seed.
"""
from __future__ import annotations

import math
from random import Random
from typing import Iterator

from .continuous import ContinuousInstance
from .grid import GridDims, Instance
from .oracle import gen_random

Cell = tuple[int, int]

FULL_SIZES = (24, 48, 72, 96)
FULL_DMAXES = (1, 2, 4, 8)
FULL_SEEDS_PER_CELL = 13  # 13 * 4 * 4 = 208 >= 200 fully occupied runs


def full_corpus() -> Iterator[tuple[int, int, int, Instance]]:
    """Fully occupied permutation instances: (size, d_max, seed, instance)."""
    for d_max in FULL_DMAXES:
        for n in FULL_SIZES:
            for seed in range(FULL_SEEDS_PER_CELL):
                inst = gen_random(GridDims(n, n), 0, d_max, seed,
                                  fully_occupied=True)
                yield n, d_max, seed, inst


def sparse_corpus(count: int, seed: int = 0) -> Iterator[Instance]:
    """Few robots travelling far: the staged-march planner regime."""
    rng = Random(seed)
    for _ in range(count):
        n1 = rng.randrange(24, 64)
        n2 = rng.randrange(24, 64)
        d_max = rng.randrange(16, min(n1, n2))
        n_robots = rng.randrange(1, max(2, min(n1 // 4, d_max // 2)))
        yield gen_random(GridDims(n1, n2), n_robots, d_max, rng.randrange(1 << 30))


def clustered_corpus(count: int, seed: int = 1) -> Iterator[Instance]:
    """Many robots moving short distances: the cluster planner regime."""
    rng = Random(seed)
    for _ in range(count):
        n1 = rng.randrange(16, 48)
        n2 = rng.randrange(16, 48)
        d_max = rng.randrange(1, 4)
        n_robots = rng.randrange(4, max(5, n1 * n2 // 8))
        yield gen_random(GridDims(n1, n2), n_robots, d_max, rng.randrange(1 << 30))


def mixed_corpus(count: int, seed: int = 2) -> Iterator[Instance]:
    """Criterion-style validity mix: full / sparse / clustered instances."""
    n_full = count // 5
    n_sparse = 2 * count // 5
    n_clustered = count - n_full - n_sparse
    rng = Random(seed)
    for _ in range(n_full):
        n = rng.randrange(24, 40)
        yield gen_random(GridDims(n, n), 0, rng.randrange(1, 4),
                         rng.randrange(1 << 30), fully_occupied=True)
    yield from sparse_corpus(n_sparse, seed + 1)
    yield from clustered_corpus(n_clustered, seed + 2)


def tiny_corpus(count: int, seed: int = 3) -> Iterator[Instance]:
    """Stratified sample over every grid shape with <= 9 cells and <= 4
    robots; includes unsolvable placements (the exact oracle decides)."""
    shapes = [(w, h) for w in range(1, 10) for h in range(1, 10) if w * h <= 9]
    rng = Random(seed)
    emitted = 0
    while emitted < count:
        for w, h in shapes:
            if emitted >= count:
                return
            cells = [(x, y) for x in range(w) for y in range(h)]
            n_robots = rng.randrange(1, min(4, len(cells)) + 1)
            start = rng.sample(cells, n_robots)
            target = rng.sample(cells, n_robots)
            yield Instance(GridDims(w, h), dict(enumerate(start)),
                           dict(enumerate(target)))
            emitted += 1


def permutation_instance(n1: int, n2: int, seed: int) -> Instance:
    """Uniformly random full permutation of the grid (unbounded d)."""
    rng = Random(seed)
    cells = [(x, y) for x in range(n1) for y in range(n2)]
    shuffled = cells[:]
    rng.shuffle(shuffled)
    return Instance(GridDims(n1, n2), dict(enumerate(cells)),
                    dict(enumerate(shuffled)))


def _separated_points(rng: Random, count: int, sep: float, side: float
                      ) -> dict[int, tuple[float, float]]:
    pts: list[tuple[float, float]] = []
    while len(pts) < count:
        p = (rng.uniform(0.0, side), rng.uniform(0.0, side))
        if all(math.dist(p, q) >= sep for q in pts):
            pts.append(p)
    return dict(enumerate(pts))


def continuous_instance(count: int, seed: int, sep: float) -> ContinuousInstance:
    """Random disk instance with the given pairwise separation; the square
    side scales with sqrt(count) to keep the density regime fixed."""
    rng = Random(seed)
    side = 2.0 * sep * math.sqrt(count) + 8.0
    return ContinuousInstance(
        _separated_points(rng, count, sep, side),
        _separated_points(rng, count, sep, side),
    )

"""Ground truth and instance generation.

* :func:`optimal_makespan` — the exact optimum by breadth-first search
  over configurations, feasible only for tiny grids; it is the
  independent oracle the planners are measured against.
* :func:`gen_random` — seed-deterministic random instances with a
  distance budget, either sparse or as a fully occupied permutation
  built from disjoint local cycles.
* :func:`gen_sat_instance` — the strong NP-hardness construction: a
  monotone 3-CNF formula becomes a grid instance whose optimal makespan
  is a critical value ``M = 6n(m+2)`` exactly when the formula is
  satisfiable; given a satisfying assignment it also emits the witness
  schedule of makespan exactly ``M``.
* :func:`gen_hex` — the dense continuous lower-bound family: a
  hex-packed arrangement of touching unit disks where every disk's
  target is two units away, yet any trajectory set needs makespan that
  grows with the packing size.
"""

from __future__ import annotations

import math
from random import Random

from .continuous import ContinuousInstance
from .grid import Cell, GridDims, Instance, Schedule, ScheduleError
from .search import bfs_plan


class BudgetExceededError(ScheduleError):
    """The instance is too large for exhaustive search."""


class InfeasibleParamsError(ScheduleError):
    """Generator parameters admit no instance."""


class NotMonotoneError(ValueError):
    """A clause mixes positive and negative literals."""


class BadArityError(ValueError):
    """A clause does not consist of three distinct variables."""


# --- exhaustive optimum ----------------------------------------------------


def optimal_makespan(
    instance: Instance,
    cap: int = 64,
    *,
    max_cells: int = 9,
    max_robots: int = 4,
) -> int | None:
    """Exact minimum number of steps, or None if ``cap`` is exceeded.

    Breadth-first search over whole configurations; the budget keeps
    the state space small (at most 9 cells and 4 robots by default).
    """
    if instance.dims.cells > max_cells:
        raise BudgetExceededError(
            f"{instance.dims.cells} cells exceeds budget {max_cells}"
        )
    if len(instance.robots) > max_robots:
        raise BudgetExceededError(
            f"{len(instance.robots)} robots exceeds budget {max_robots}"
        )
    found = bfs_plan(instance.dims, instance.start, instance.target, cap=cap)
    if found is None:
        return None  # unknown: optimum exceeds the cap
    return found[1]


# --- random instances ------------------------------------------------------


def gen_random(
    dims: GridDims,
    n_robots: int,
    d_max: int,
    seed: int,
    *,
    fully_occupied: bool = False,
) -> Instance:
    """Deterministic-per-seed random instance with max distance <= d_max."""
    rng = Random(seed)
    if fully_occupied:
        return _gen_permutation(dims, d_max, rng)
    if n_robots > dims.cells:
        raise InfeasibleParamsError(f"{n_robots} robots on {dims.cells} cells")
    cells = [(x, y) for x in range(dims.n1) for y in range(dims.n2)]
    starts = rng.sample(cells, n_robots)
    target: dict[int, Cell] = {}
    used: set[Cell] = set()
    for r, (x, y) in enumerate(starts):
        options = [
            (x + dx, y + dy)
            for dx in range(-d_max, d_max + 1)
            for dy in range(-d_max + abs(dx), d_max - abs(dx) + 1)
            if dims.contains((x + dx, y + dy)) and (x + dx, y + dy) not in used
        ]
        if not options:
            raise InfeasibleParamsError(f"no free target within {d_max} of {x, y}")
        target[r] = rng.choice(options)
        used.add(target[r])
    return Instance(dims=dims, start=dict(enumerate(starts)), target=target)


def _gen_permutation(dims: GridDims, d_max: int, rng: Random) -> Instance:
    """Fully occupied permutation composed of disjoint local cycles:
    boundary rings of random windows rotated by up to d_max positions.
    A rotation by k moves every ring cell k steps along the ring, so its
    displacement is at most k <= d_max."""
    perm = {c: c for c in ((x, y) for x in range(dims.n1) for y in range(dims.n2))}
    used: set[Cell] = set()
    attempts = max(4, dims.cells // 4)
    for _ in range(attempts):
        w = rng.randint(2, max(2, min(d_max + 1, dims.n1)))
        h = rng.randint(2, max(2, min(d_max + 1, dims.n2)))
        if w > dims.n1 or h > dims.n2:
            continue
        x0 = rng.randrange(dims.n1 - w + 1)
        y0 = rng.randrange(dims.n2 - h + 1)
        ring = (
            [(x0 + i, y0) for i in range(w)]
            + [(x0 + w - 1, y0 + j) for j in range(1, h)]
            + [(x0 + i, y0 + h - 1) for i in range(w - 2, -1, -1)]
            + [(x0, y0 + j) for j in range(h - 2, 0, -1)]
        )
        if any(c in used for c in ring):
            continue
        used.update(ring)
        k = rng.randint(1, min(d_max, len(ring) - 1))
        for src, dst in zip(ring, ring[k:] + ring[:k]):
            perm[src] = dst
    cells = sorted(perm)
    return Instance(
        dims=dims,
        start={r: c for r, c in enumerate(cells)},
        target={r: perm[c] for r, c in enumerate(cells)},
    )


# --- hardness construction -------------------------------------------------

Clause = tuple[bool, tuple[int, int, int]]  # (negative?, zero-based variables)


def critical_makespan(n_vars: int, n_clauses: int) -> int:
    """The threshold makespan of the reduction: feasible iff satisfiable."""
    return 6 * n_vars * (n_clauses + 2)


def _parse_clauses(formula: list[list[int]], n_vars: int) -> list[Clause]:
    clauses: list[Clause] = []
    for lits in formula:
        if len(lits) != 3:
            raise BadArityError(f"clause {lits} does not have three literals")
        if all(l > 0 for l in lits):
            negative = False
        elif all(l < 0 for l in lits):
            negative = True
        else:
            raise NotMonotoneError(f"clause {lits} mixes polarities")
        vs = tuple(sorted(abs(l) - 1 for l in lits))
        if len(set(vs)) != 3:
            raise BadArityError(f"clause {lits} repeats a variable")
        if vs[2] >= n_vars:
            raise BadArityError(f"clause {lits} names variable > {n_vars}")
        clauses.append((negative, vs))
    return clauses


def gen_sat_instance(
    formula: list[list[int]],
    n_vars: int,
    assignment: list[bool] | None = None,
) -> tuple[Instance, int, Schedule | None, dict[int, int]]:
    """Instance whose optimal makespan is ``M = 6n(m+2)`` iff the
    monotone 3-CNF ``formula`` (DIMACS-style signed 1-based literals)
    is satisfiable.

    Returns the instance, the critical makespan M, the witness schedule
    (when a satisfying ``assignment`` is given, of makespan exactly M),
    and a 3-class color map over robot ids.

    Robots and their roles:

    * one *variable robot* per variable, crossing the whole construction
      left to right on one of two row tracks — the track encodes the
      truth value (low = true);
    * *left/right auxiliary* columns that pin the variable robots'
      timing so they occupy column ``k - 1`` after step ``k``;
    * three *checker robots* per clause, side-stepping right and then
      ascending through the variable tracks; a checker gets through
      without waiting exactly when its literal is satisfied;
    * descending *side-step auxiliaries* over every column a checker
      side-steps across, forcing the side steps to happen first;
    * one *clause robot* per clause with zero slack, which can reach its
      target in time only when some checker of its clause did not wait.
    """
    n = n_vars
    clauses = _parse_clauses(formula, n)
    m = len(clauses)
    M = critical_makespan(n, m)

    start: dict[int, Cell] = {}
    target: dict[int, Cell] = {}
    moves: dict[int, list[str]] = {}
    colors: dict[int, int] = {}
    witness = assignment is not None

    def add(s: Cell, t: Cell, path: list[str] | None, color: int) -> int:
        rid = len(start)
        start[rid] = s
        target[rid] = t
        colors[rid] = color
        if witness:
            assert path is not None and len(path) == M
            moves[rid] = path
        return rid

    for j in range(n):
        if witness:
            if assignment[j]:  # true = stay on the low track
                path = ["."] + ["E"] * (M - 2) + ["."]
            else:  # false = one row up, then drop at the end
                path = ["N"] + ["E"] * (M - 2) + ["S"]
        else:
            path = None
        add((0, 6 * j), (M - 2, 6 * j), path, 1)
        add((1, 6 * j + 1), (1, 6 * j + 1 - M), ["S"] * M if witness else None, 3)
        add(
            (M - 3, -M + 6 * j + 1),
            (M - 3, 6 * j + 1),
            ["N"] * M if witness else None,
            3,
        )

    for idx, (negative, (j1, j2, j3)) in enumerate(clauses):
        i = idx + 1  # clause gadgets are stacked below the variables
        f = 1 if negative else 0
        d1, d2 = 6 * (j3 - j1), 6 * (j3 - j2)
        side = {1: d1 // 2 + 2, 2: d2 // 2 + 1, 3: 0}
        y0 = -6 * n * i - f
        tops: dict[int, Cell] = {}
        for ell, j in ((1, j1), (2, j2), (3, j3)):
            s = side[ell]
            alpha = (6 * (n * i + j), y0)
            top = (alpha[0] + s, alpha[1] + M - 1 - s)
            tops[ell] = top
            if witness:
                satisfied = assignment[j] != negative
                path = ["E"] * s + ["N"] * (M - 1 - s)
                if satisfied:
                    path.append(".")
                else:
                    # wait exactly while the variable robot crosses
                    path.insert(alpha[0] + s, ".")
            else:
                path = None
            add(alpha, top, path, 2)
            # descending guards above every side-stepped column force
            # the side steps to precede the ascent
            for c in range(s):
                gx, gy = alpha[0] + c, y0 + c + 2
                add((gx, gy), (gx, gy - M), ["S"] * M if witness else None, 3)
        t1 = tops[1]
        clause_start = (t1[0] - 1, t1[1] + M - 5)
        clause_target = (t1[0] - 3, t1[1] - 3)
        add(
            clause_start,
            clause_target,
            ["W", "W"] + ["S"] * (M - 2) if witness else None,
            3,
        )

    # translate everything onto a nonnegative grid with a 1-cell margin
    xs = [c[0] for c in list(start.values()) + list(target.values())]
    ys = [c[1] for c in list(start.values()) + list(target.values())]
    ox, oy = 1 - min(xs), 1 - min(ys)
    dims = GridDims(max(xs) + ox + 2, max(ys) + oy + 2)
    shift = lambda c: (c[0] + ox, c[1] + oy)  # noqa: E731
    instance = Instance(
        dims=dims,
        start={r: shift(c) for r, c in start.items()},
        target={r: shift(c) for r, c in target.items()},
    )
    schedule: Schedule | None = None
    if witness:
        schedule = [
            {r: moves[r][k] for r in moves if moves[r][k] != "."}
            for k in range(M)
        ]
    return instance, M, schedule, colors


# --- hex-packed lower-bound family ----------------------------------------


def _hex_rings(rings: int) -> list[list[tuple[float, float]]]:
    """Centered hexagonal packing of touching unit disks, by ring."""
    axial = [
        (2.0, 0.0),
        (1.0, math.sqrt(3.0)),
        (-1.0, math.sqrt(3.0)),
        (-2.0, 0.0),
        (-1.0, -math.sqrt(3.0)),
        (1.0, -math.sqrt(3.0)),
    ]
    out: list[list[tuple[float, float]]] = [[(0.0, 0.0)]]
    for k in range(1, rings + 1):
        ring: list[tuple[float, float]] = []
        x, y = axial[4][0] * k, axial[4][1] * k  # start at the bottom-left corner
        for side in range(6):
            dx, dy = axial[side]
            for _ in range(k):
                ring.append((x, y))
                x, y = x + dx, y + dy
        out.append(ring)
    return out


def gen_hex(n_disks: int) -> ContinuousInstance:
    """Hex-packed touching disks with every target two units away.

    ``n_disks`` must be a centered hexagonal number ``1 + 3k(k+1)``.
    The interpretation of the pictorial target arrangement: each ring
    is rotated by one packing position (adjacent positions on a ring
    touch, so every disk's start-target distance is exactly 2, while
    the occupied point set is unchanged); the center disk stays put.
    """
    if n_disks == 1:
        return ContinuousInstance({0: (0.0, 0.0)}, {0: (2.0, 0.0)})
    k, total = 0, 1
    while total < n_disks:
        k += 1
        total = 1 + 3 * k * (k + 1)
    if total != n_disks:
        raise InfeasibleParamsError(
            f"{n_disks} is not a centered hexagonal number (next is {total})"
        )
    rings = _hex_rings(k)
    start: dict[int, tuple[float, float]] = {}
    goal: dict[int, tuple[float, float]] = {}
    rid = 0
    for ring in rings:
        rotated = ring[1:] + ring[:1] if len(ring) > 1 else ring
        for p, q in zip(ring, rotated):
            start[rid] = p
            goal[rid] = q
            rid += 1
    return ContinuousInstance(start, goal)

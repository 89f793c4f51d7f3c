"""Planning for colored (and unlabeled) swarms.

A colored instance is a pair of *images*: assignments of a color in
``1..k`` to some grid cells, with every remaining cell padded by the
reserved filler color ``k + 1``.  Two images are compatible when every
color class has the same cardinality in both.  Planning reduces to the
labeled problem: for each color class we compute a perfect matching
between its source and target cells that minimizes the longest
(Manhattan) pair distance, the matchings induce a labeled instance on
the fully occupied grid, and the labeled scheduler does the rest.  The
bottleneck value lower-bounds the makespan of *any* colored schedule,
so it is the right denominator for stretch measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .grid import Cell, GridDims, Instance, ScheduleError, Schedule, apply_schedule
from .scheduler import plan_full


class DimsMismatchError(ScheduleError):
    """The two images have different grid dimensions."""


class SizeMismatchError(ScheduleError):
    """The two point sets of a matching problem differ in size."""


class IncompatibleError(ScheduleError):
    """Color class cardinalities differ between the two images."""


@dataclass(frozen=True)
class Image:
    """A total coloring of the grid: ``cells[(x, y)]`` is a color ≥ 1.

    Cells absent from the input are padded with the filler color
    ``num_colors + 1`` where ``num_colors`` is the largest non-filler
    color; :meth:`padded` performs that completion.
    """

    dims: GridDims
    cells: dict[Cell, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for cell, c in self.cells.items():
            if not self.dims.contains(cell):
                raise ValueError(f"cell {cell} outside {self.dims} grid")
            if c < 1:
                raise ValueError(f"color {c} is not a positive integer")

    def padded(self, filler: int) -> "Image":
        """Return a total image with empty cells set to ``filler``."""
        n1, n2 = self.dims.n1, self.dims.n2
        full = dict(self.cells)
        for x in range(n1):
            for y in range(n2):
                full.setdefault((x, y), filler)
        return Image(self.dims, full)

    def color_classes(self) -> dict[int, list[Cell]]:
        classes: dict[int, list[Cell]] = {}
        for cell in sorted(self.cells):
            classes.setdefault(self.cells[cell], []).append(cell)
        return classes


def check_compatible(source: Image, target: Image) -> bool:
    """True iff every color class has equal cardinality in both images."""
    if source.dims != target.dims:
        raise DimsMismatchError(
            f"image dims differ: {source.dims} vs {target.dims}"
        )
    a = {c: len(v) for c, v in source.color_classes().items()}
    b = {c: len(v) for c, v in target.color_classes().items()}
    return a == b


def _manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _threshold_matching(
    a: list[Cell], b: list[Cell], limit: int
) -> dict[int, int] | None:
    """A perfect matching of indices using only pairs within ``limit``,
    or None if the threshold graph admits no perfect matching."""
    g = nx.Graph()
    left = [("a", i) for i in range(len(a))]
    right = [("b", j) for j in range(len(b))]
    g.add_nodes_from(left, bipartite=0)
    g.add_nodes_from(right, bipartite=1)
    for i, p in enumerate(a):
        for j, q in enumerate(b):
            if _manhattan(p, q) <= limit:
                g.add_edge(("a", i), ("b", j))
    match = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    pairs = {i: node[1] for (kind, i), node in match.items() if kind == "a"}
    return pairs if len(pairs) == len(a) else None


def bottleneck_matching(a: list[Cell], b: list[Cell]) -> list[tuple[Cell, Cell]]:
    """Perfect matching between ``a`` and ``b`` minimizing the maximum
    Manhattan pair distance.

    Binary search over the sorted multiset of pairwise distances, with
    feasibility at each threshold decided by maximum bipartite matching.
    """
    if len(a) != len(b):
        raise SizeMismatchError(f"point sets differ in size: {len(a)} vs {len(b)}")
    if not a:
        return []
    dists = sorted({_manhattan(p, q) for p in a for q in b})
    lo, hi = 0, len(dists) - 1
    best = _threshold_matching(a, b, dists[hi])
    assert best is not None, "complete threshold graph must admit a matching"
    while lo < hi:
        mid = (lo + hi) // 2
        m = _threshold_matching(a, b, dists[mid])
        if m is None:
            lo = mid + 1
        else:
            best, hi = m, mid
    return [(a[i], b[j]) for i, j in sorted(best.items())]


def induced_instance(source: Image, target: Image) -> Instance:
    """The labeled instance induced by per-color bottleneck matchings.

    Both images are padded with the shared filler color, so the result
    is a fully occupied permutation instance.
    """
    if not check_compatible(source, target):
        raise IncompatibleError("color class cardinalities differ")
    filler = max(
        [c for img in (source, target) for c in img.cells.values()], default=0
    ) + 1
    src = source.padded(filler)
    dst = target.padded(filler)
    start: dict[int, Cell] = {}
    goal: dict[int, Cell] = {}
    rid = 0
    src_classes = src.color_classes()
    dst_classes = dst.color_classes()
    for color in sorted(src_classes):
        for p, q in bottleneck_matching(src_classes[color], dst_classes[color]):
            start[rid] = p
            goal[rid] = q
            rid += 1
    return Instance(dims=source.dims, start=start, target=goal)


def image_of(instance: Instance, placement: dict[int, Cell], colors: dict[int, int]) -> Image:
    """The image drawn by ``placement`` under the robot color map."""
    return Image(instance.dims, {cell: colors[r] for r, cell in placement.items()})


def plan_colored(source: Image, target: Image) -> Schedule:
    """Schedule repainting ``source`` into ``target``.

    The final configuration matches ``target`` at the color level only;
    which same-colored robot ends on which cell is unspecified.
    """
    instance = induced_instance(source, target)
    schedule = plan_full(instance, pad=False)
    apply_schedule(instance, schedule)  # validates the target is reached
    return schedule


def matching_distance(source: Image, target: Image) -> int:
    """Largest bottleneck value over the color classes — the makespan
    lower bound used as the stretch denominator for colored plans."""
    instance = induced_instance(source, target)
    return max(
        (_manhattan(instance.start[r], instance.target[r]) for r in instance.robots),
        default=0,
    )

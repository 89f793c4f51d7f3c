"""SVG rendering of grid schedules.

One frame per configuration (a k-step schedule yields k+1 frames): the
grid, one filled circle per robot, and an arrow per robot that moves in
the upcoming step.  Robots are colored by color class when a color map
is given, otherwise by a stable hash of their label.  An optional
single-file animated SVG interpolates the same positions.
"""

from __future__ import annotations

import hashlib

from .grid import MOVE_VECTORS, Cell, Instance, Schedule

CELL = 24  # pixels per grid cell
PALETTE = [
    "#4477aa", "#ee6677", "#228833", "#ccbb44",
    "#66ccee", "#aa3377", "#bbbbbb", "#222255",
]


def _robot_color(robot: int, colors: dict[int, int] | None) -> str:
    if colors is not None and robot in colors:
        return PALETTE[(colors[robot] - 1) % len(PALETTE)]
    digest = hashlib.sha256(str(robot).encode()).digest()
    return f"#{digest[0]:02x}{digest[1]:02x}{digest[2]:02x}"


def _xy(dims, cell: Cell) -> tuple[float, float]:
    # SVG y grows downward; grid y grows upward
    return (cell[0] + 0.5) * CELL, (dims.n2 - cell[1] - 0.5) * CELL


def _grid_lines(dims) -> str:
    w, h = dims.n1 * CELL, dims.n2 * CELL
    parts = [f'<rect width="{w}" height="{h}" fill="white"/>']
    for i in range(dims.n1 + 1):
        parts.append(
            f'<line x1="{i * CELL}" y1="0" x2="{i * CELL}" y2="{h}" '
            'stroke="#dddddd"/>'
        )
    for j in range(dims.n2 + 1):
        parts.append(
            f'<line x1="0" y1="{j * CELL}" x2="{w}" y2="{j * CELL}" '
            'stroke="#dddddd"/>'
        )
    return "".join(parts)


def _svg(dims, body: str) -> str:
    w, h = dims.n1 * CELL, dims.n2 * CELL
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">{body}</svg>'
    )


def render_frames(
    instance: Instance,
    schedule: Schedule,
    colors: dict[int, int] | None = None,
) -> list[str]:
    """SVG documents for every configuration the schedule visits."""
    dims = instance.dims
    placements = [dict(instance.start)]
    for step in schedule:
        nxt = dict(placements[-1])
        for r, move in step.items():
            dx, dy = MOVE_VECTORS[move]
            x, y = nxt[r]
            nxt[r] = (x + dx, y + dy)
        placements.append(nxt)

    frames = []
    for idx, placement in enumerate(placements):
        body = [_grid_lines(dims)]
        step = schedule[idx] if idx < len(schedule) else {}
        for r in sorted(placement):
            cx, cy = _xy(dims, placement[r])
            fill = _robot_color(r, colors)
            body.append(
                f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{CELL * 0.38:.1f}" '
                f'fill="{fill}"/>'
            )
            move = step.get(r)
            if move and move != ".":
                dx, dy = MOVE_VECTORS[move]
                ex, ey = cx + dx * CELL * 0.45, cy - dy * CELL * 0.45
                body.append(
                    f'<line x1="{cx:.1f}" y1="{cy:.1f}" x2="{ex:.1f}" '
                    f'y2="{ey:.1f}" stroke="black" stroke-width="2"/>'
                )
        frames.append(_svg(dims, "".join(body)))
    return frames


def render_animated(
    instance: Instance,
    schedule: Schedule,
    colors: dict[int, int] | None = None,
    seconds_per_step: float = 0.4,
) -> str:
    """A single SVG animating every robot along its cell path."""
    dims = instance.dims
    placements = [dict(instance.start)]
    for step in schedule:
        nxt = dict(placements[-1])
        for r, move in step.items():
            dx, dy = MOVE_VECTORS[move]
            x, y = nxt[r]
            nxt[r] = (x + dx, y + dy)
        placements.append(nxt)
    total = max(len(schedule), 1) * seconds_per_step

    body = [_grid_lines(dims)]
    for r in sorted(instance.start):
        xs, ys = zip(*(_xy(dims, p[r]) for p in placements))
        fill = _robot_color(r, colors)
        body.append(
            f'<circle cx="{xs[0]:.1f}" cy="{ys[0]:.1f}" '
            f'r="{CELL * 0.38:.1f}" fill="{fill}">'
            f'<animate attributeName="cx" dur="{total}s" repeatCount="indefinite" '
            f'values="{";".join(f"{x:.1f}" for x in xs)}"/>'
            f'<animate attributeName="cy" dur="{total}s" repeatCount="indefinite" '
            f'values="{";".join(f"{y:.1f}" for y in ys)}"/>'
            "</circle>"
        )
    return _svg(dims, "".join(body))

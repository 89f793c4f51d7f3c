"""Versioned JSON formats for instances, schedules, images and trajectories."""
from __future__ import annotations

import json
from typing import Any, TextIO

from .grid import MOVE_VECTORS, GridDims, Instance, Schedule

INSTANCE_FORMAT = "swarmplan-instance/1"
SCHEDULE_FORMAT = "swarmplan-schedule/1"
IMAGE_FORMAT = "swarmplan-image/1"
CONTINUOUS_FORMAT = "swarmplan-continuous/1"
TRAJECTORY_FORMAT = "swarmplan-trajectories/1"


class FormatError(ValueError):
    """Malformed or wrong-version document."""


def _expect(doc: Any, fmt: str) -> None:
    if not isinstance(doc, dict):
        raise FormatError("document must be a JSON object")
    got = doc.get("format")
    if got != fmt:
        raise FormatError(f"expected format {fmt!r}, got {got!r}")


def instance_to_json(instance: Instance, colors: dict[int, int] | None = None) -> dict:
    robots = []
    for r in instance.robots:
        entry: dict[str, Any] = {
            "id": r,
            "start": list(instance.start[r]),
            "target": list(instance.target[r]),
        }
        if colors and r in colors:
            entry["color"] = colors[r]
        robots.append(entry)
    return {
        "format": INSTANCE_FORMAT,
        "dims": [instance.dims.n1, instance.dims.n2],
        "robots": robots,
    }


def instance_from_json(doc: Any) -> tuple[Instance, dict[int, int]]:
    """Returns the instance plus any per-robot colors present."""
    _expect(doc, INSTANCE_FORMAT)
    try:
        dims = GridDims(int(doc["dims"][0]), int(doc["dims"][1]))
        start: dict[int, tuple[int, int]] = {}
        target: dict[int, tuple[int, int]] = {}
        colors: dict[int, int] = {}
        for entry in doc["robots"]:
            rid = int(entry["id"])
            if rid in start:
                raise FormatError(f"duplicate robot id {rid}")
            start[rid] = (int(entry["start"][0]), int(entry["start"][1]))
            target[rid] = (int(entry["target"][0]), int(entry["target"][1]))
            if "color" in entry:
                colors[rid] = int(entry["color"])
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed instance document: {exc}") from exc
    return Instance(dims, start, target), (colors or None)


def schedule_to_json(schedule: Schedule) -> dict:
    return {
        "format": SCHEDULE_FORMAT,
        "steps": [{str(r): m for r, m in sorted(step.items())} for step in schedule],
    }


def schedule_from_json(doc: Any) -> Schedule:
    _expect(doc, SCHEDULE_FORMAT)
    try:
        steps = []
        for raw in doc["steps"]:
            step = {int(r): str(m) for r, m in raw.items()}
            for m in step.values():
                if m not in MOVE_VECTORS:
                    raise FormatError(f"unknown move {m!r}")
            steps.append(step)
        return steps
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed schedule document: {exc}") from exc


def image_to_json(dims: GridDims, cells: list[list[int]]) -> dict:
    return {"format": IMAGE_FORMAT, "dims": [dims.n1, dims.n2], "cells": cells}


def image_from_json(doc: Any) -> tuple[GridDims, list[list[int]]]:
    """cells[y][x] = color of the cell at (x, y); rows bottom-up."""
    _expect(doc, IMAGE_FORMAT)
    try:
        dims = GridDims(int(doc["dims"][0]), int(doc["dims"][1]))
        cells = [[int(c) for c in row] for row in doc["cells"]]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed image document: {exc}") from exc
    if len(cells) != dims.n2 or any(len(row) != dims.n1 for row in cells):
        raise FormatError("image cell grid does not match dims")
    return dims, cells


def continuous_to_json(starts: dict[int, tuple[float, float]],
                       targets: dict[int, tuple[float, float]]) -> dict:
    return {
        "format": CONTINUOUS_FORMAT,
        "robots": [
            {"id": r, "start": list(starts[r]), "target": list(targets[r])}
            for r in sorted(starts)
        ],
    }


def continuous_from_json(doc: Any) -> tuple[dict[int, tuple[float, float]], dict[int, tuple[float, float]]]:
    _expect(doc, CONTINUOUS_FORMAT)
    starts: dict[int, tuple[float, float]] = {}
    targets: dict[int, tuple[float, float]] = {}
    try:
        for entry in doc["robots"]:
            rid = int(entry["id"])
            if rid in starts:
                raise FormatError(f"duplicate robot id {rid}")
            starts[rid] = (float(entry["start"][0]), float(entry["start"][1]))
            targets[rid] = (float(entry["target"][0]), float(entry["target"][1]))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed continuous instance: {exc}") from exc
    return starts, targets


def trajectories_to_json(trajectories: dict[int, list[tuple[float, tuple[float, float]]]]) -> dict:
    return {
        "format": TRAJECTORY_FORMAT,
        "robots": [
            {"id": r, "breakpoints": [[t, p[0], p[1]] for t, p in trajectories[r]]}
            for r in sorted(trajectories)
        ],
    }


def trajectories_from_json(doc: Any) -> dict[int, list[tuple[float, tuple[float, float]]]]:
    _expect(doc, TRAJECTORY_FORMAT)
    out: dict[int, list[tuple[float, tuple[float, float]]]] = {}
    try:
        for entry in doc["robots"]:
            rid = int(entry["id"])
            out[rid] = [(float(b[0]), (float(b[1]), float(b[2]))) for b in entry["breakpoints"]]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed trajectory document: {exc}") from exc
    return out


def load(path_or_file: str | TextIO) -> Any:
    if hasattr(path_or_file, "read"):
        return json.load(path_or_file)
    with open(path_or_file, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump(doc: Any, path_or_file: str | TextIO) -> None:
    if hasattr(path_or_file, "write"):
        json.dump(doc, path_or_file)
        return
    with open(path_or_file, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")

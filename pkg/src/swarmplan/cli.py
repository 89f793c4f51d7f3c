"""Command-line interface.

Subcommands: ``plan``, ``plan-colored``, ``plan-continuous``,
``validate``, ``render``, ``gen``, ``oracle``, ``stats``.  All input
and output is JSON (CSV for ``stats``); errors are reported as a JSON
object on stderr.  Exit codes: 0 success, 1 semantic failure (invalid
schedule, infeasible instance), 2 I/O or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import io as sio
from .colored import Image, matching_distance, plan_colored
from .continuous import (
    ContinuousInstance,
    TrajectorySet,
    plan_dense,
    plan_separated,
    validate_trajectories,
)
from .grid import (
    GridDims,
    Instance,
    Schedule,
    ScheduleError,
    apply_schedule,
    max_distance,
)
from .oracle import gen_hex, gen_random, gen_sat_instance, optimal_makespan
from .render import render_animated, render_frames
from .scheduler import plan_auto

log = logging.getLogger("swarmplan")


def _fail(kind: str, message: str, code: int) -> int:
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")
    return code


def _load(path: str):
    try:
        return sio.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise _CliIOError(str(exc)) from exc


class _CliIOError(Exception):
    pass


def _print_plan_stats(makespan: int, d: float) -> None:
    stretch = makespan / d if d else 0.0
    print(f"makespan {makespan}  d {d}  stretch {stretch:.3f}")


def cmd_plan(args) -> int:
    instance, _colors = sio.instance_from_json(_load(args.infile))
    schedule = plan_auto(instance)
    apply_schedule(instance, schedule)
    sio.dump(sio.schedule_to_json(schedule), args.outfile)
    _print_plan_stats(len(schedule), max_distance(instance))
    return 0


def cmd_plan_colored(args) -> int:
    src_doc, dst_doc = _load(args.infile), _load(args.target)
    dims, cells = sio.image_from_json(src_doc)
    dims2, cells2 = sio.image_from_json(dst_doc)
    src = Image(dims, {(x, y): c for y, row in enumerate(cells)
                       for x, c in enumerate(row)})
    dst = Image(dims2, {(x, y): c for y, row in enumerate(cells2)
                        for x, c in enumerate(row)})
    schedule = plan_colored(src, dst)
    sio.dump(sio.schedule_to_json(schedule), args.outfile)
    _print_plan_stats(len(schedule), matching_distance(src, dst))
    return 0


def cmd_plan_continuous(args) -> int:
    starts, targets = sio.continuous_from_json(_load(args.infile))
    instance = ContinuousInstance(starts, targets)
    planner = plan_separated if args.mode == "separated" else plan_dense
    ts = planner(instance)
    report = validate_trajectories(ts, instance)
    if not report.compatible:
        return _fail("incompatible", "planner emitted incompatible trajectories", 1)
    sio.dump(sio.trajectories_to_json(ts.paths), args.outfile)
    d = instance.max_distance
    print(f"makespan {ts.makespan:.3f}  d {d:.3f}  "
          f"stretch {ts.makespan / d if d else 0.0:.3f}")
    return 0


def cmd_validate(args) -> int:
    doc = _load(args.schedule)
    fmt = doc.get("format", "") if isinstance(doc, dict) else ""
    if fmt == sio.TRAJECTORY_FORMAT:
        starts, targets = sio.continuous_from_json(_load(args.infile))
        ts = TrajectorySet(sio.trajectories_from_json(doc))
        report = validate_trajectories(ts, ContinuousInstance(starts, targets))
        if report.compatible:
            print(f"ok  makespan {ts.makespan:.3f}")
            return 0
        first = (report.endpoint_errors
                 or report.speed_violations
                 or report.separation_violations)[0]
        return _fail("invalid-trajectories", str(first), 1)
    instance, _colors = sio.instance_from_json(_load(args.infile))
    schedule = sio.schedule_from_json(doc)
    try:
        apply_schedule(instance, schedule)
    except ScheduleError as exc:
        return _fail("invalid-schedule", str(exc), 1)
    print(f"ok  makespan {len(schedule)}")
    return 0


def cmd_render(args) -> int:
    instance, colors = sio.instance_from_json(_load(args.infile))
    schedule = sio.schedule_from_json(_load(args.schedule))
    outdir = Path(args.frames_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    frames = render_frames(instance, schedule, colors or None)
    for i, frame in enumerate(frames):
        (outdir / f"frame_{i:04d}.svg").write_text(frame)
    if args.animate:
        (outdir / "animation.svg").write_text(
            render_animated(instance, schedule, colors or None)
        )
    print(f"wrote {len(frames)} frames to {outdir}")
    return 0


def cmd_gen(args) -> int:
    if args.kind == "random":
        instance = gen_random(
            GridDims(args.n1, args.n2), args.robots, args.dmax,
            seed=args.seed, fully_occupied=args.full,
        )
        sio.dump(sio.instance_to_json(instance), args.outfile)
    elif args.kind == "sat":
        formula = _load(args.infile)
        instance, M, witness, colors = gen_sat_instance(
            formula["clauses"], formula["variables"],
            assignment=formula.get("assignment"),
        )
        sio.dump(sio.instance_to_json(instance, colors), args.outfile)
        if witness is not None and args.witness:
            sio.dump(sio.schedule_to_json(witness), args.witness)
        print(f"critical makespan {M}")
    else:  # hex
        instance = gen_hex(args.robots)
        sio.dump(sio.continuous_to_json(instance.start, instance.target),
                 args.outfile)
    return 0


def cmd_oracle(args) -> int:
    instance, _colors = sio.instance_from_json(_load(args.infile))
    result = optimal_makespan(instance, cap=args.cap)
    if result is None:
        print("unknown")
        return 1
    print(result)
    return 0


def cmd_stats(args) -> int:
    rows = []
    corpus = Path(args.corpus)
    for path in sorted(corpus.glob("*.json")):
        doc = sio.load(str(path))
        fmt = doc.get("format", "") if isinstance(doc, dict) else ""
        if fmt == sio.INSTANCE_FORMAT:
            instance, _colors = sio.instance_from_json(doc)
            schedule = plan_auto(instance)
            apply_schedule(instance, schedule)
            d = max_distance(instance)
            rows.append({
                "instance": path.name, "kind": "discrete",
                "robots": len(instance.robots), "makespan": len(schedule),
                "d": d, "ratio": len(schedule) / d if d else 0.0,
            })
        elif fmt == sio.CONTINUOUS_FORMAT:
            starts, targets = sio.continuous_from_json(doc)
            inst = ContinuousInstance(starts, targets)
            ts = plan_dense(inst)
            d = inst.max_distance
            denom = d + math.sqrt(len(inst.robots))
            rows.append({
                "instance": path.name, "kind": "continuous",
                "robots": len(inst.robots), "makespan": round(ts.makespan, 3),
                "d": round(d, 3), "ratio": ts.makespan / denom if denom else 0.0,
            })
    fields = ["instance", "kind", "robots", "makespan", "d", "ratio"]
    out = open(args.outfile, "w", newline="") if args.outfile != "-" else sys.stdout
    writer = csv.DictWriter(out, fieldnames=fields)
    writer.writeheader()
    writer.writerows(rows)
    if out is not sys.stdout:
        out.close()
    if rows:
        worst = max(r["ratio"] for r in rows)
        print(f"{len(rows)} instances, max ratio {worst:.3f}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarmplan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="schedule a labeled grid instance")
    plan.add_argument("--in", dest="infile", required=True)
    plan.add_argument("--out", dest="outfile", required=True)
    plan.set_defaults(func=cmd_plan)

    pc = sub.add_parser("plan-colored", help="schedule a colored image pair")
    pc.add_argument("--in", dest="infile", required=True)
    pc.add_argument("--target", required=True)
    pc.add_argument("--out", dest="outfile", required=True)
    pc.set_defaults(func=cmd_plan_colored)

    pk = sub.add_parser("plan-continuous", help="plan disk trajectories")
    pk.add_argument("--in", dest="infile", required=True)
    pk.add_argument("--out", dest="outfile", required=True)
    pk.add_argument("--mode", choices=["separated", "dense"], default="dense")
    pk.set_defaults(func=cmd_plan_continuous)

    val = sub.add_parser("validate", help="check a schedule or trajectory set")
    val.add_argument("--in", dest="infile", required=True)
    val.add_argument("--schedule", required=True)
    val.set_defaults(func=cmd_validate)

    ren = sub.add_parser("render", help="render schedule frames as SVG")
    ren.add_argument("--in", dest="infile", required=True)
    ren.add_argument("--schedule", required=True)
    ren.add_argument("--frames-dir", dest="frames_dir", required=True)
    ren.add_argument("--animate", action="store_true")
    ren.set_defaults(func=cmd_render)

    gen = sub.add_parser("gen", help="generate instances")
    gen.add_argument("kind", choices=["random", "sat", "hex"])
    gen.add_argument("--in", dest="infile", help="formula JSON for kind=sat")
    gen.add_argument("--out", dest="outfile", required=True)
    gen.add_argument("--witness", help="output path for the SAT witness")
    gen.add_argument("--n1", type=int, default=12)
    gen.add_argument("--n2", type=int, default=12)
    gen.add_argument("--robots", type=int, default=7)
    gen.add_argument("--dmax", type=int, default=4)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--full", action="store_true",
                     help="fully occupied permutation instance")
    gen.set_defaults(func=cmd_gen)

    orc = sub.add_parser("oracle", help="exact optimum for tiny instances")
    orc.add_argument("--in", dest="infile", required=True)
    orc.add_argument("--cap", type=int, default=64)
    orc.set_defaults(func=cmd_oracle)

    st = sub.add_parser("stats", help="plan a corpus and emit CSV metrics")
    st.add_argument("--corpus", required=True)
    st.add_argument("--out", dest="outfile", default="-")
    st.set_defaults(func=cmd_stats)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("SWARMPLAN_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliIOError as exc:
        return _fail("io", str(exc), 2)
    except FileNotFoundError as exc:
        return _fail("io", str(exc), 2)
    except ScheduleError as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    except (ValueError, KeyError) as exc:
        return _fail("usage", str(exc), 2)


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end tests of the command-line interface."""

import json

import pytest

from swarmplan import io as sio
from swarmplan.cli import main
from swarmplan.grid import GridDims, Instance
from swarmplan.oracle import gen_random


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def identity_instance(tmp_path):
    inst = Instance(GridDims(5, 5), {0: (1, 1)}, {0: (1, 1)})
    return write(tmp_path / "inst.json", sio.instance_to_json(inst))


def test_plan_identity(tmp_path, identity_instance, capsys):
    out = str(tmp_path / "sched.json")
    assert main(["plan", "--in", identity_instance, "--out", out]) == 0
    assert "makespan 0" in capsys.readouterr().out
    assert sio.schedule_from_json(json.loads(open(out).read())) == []


def test_plan_validate_roundtrip(tmp_path):
    inst = gen_random(GridDims(14, 14), 12, 4, seed=3)
    ipath = write(tmp_path / "inst.json", sio.instance_to_json(inst))
    spath = str(tmp_path / "sched.json")
    assert main(["plan", "--in", ipath, "--out", spath]) == 0
    assert main(["validate", "--in", ipath, "--schedule", spath]) == 0


def test_validate_rejects_swap(tmp_path, capsys):
    inst = Instance(GridDims(3, 1), {0: (0, 0), 1: (1, 0)},
                    {0: (1, 0), 1: (0, 0)})
    ipath = write(tmp_path / "inst.json", sio.instance_to_json(inst))
    spath = write(tmp_path / "bad.json",
                  sio.schedule_to_json([{0: "E", 1: "W"}]))
    assert main(["validate", "--in", ipath, "--schedule", spath]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "invalid-schedule"


def test_missing_file_is_io_error(tmp_path, capsys):
    assert main(["plan", "--in", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "x.json")]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "io"


def test_render_frames(tmp_path, identity_instance):
    inst = gen_random(GridDims(6, 6), 4, 2, seed=1)
    ipath = write(tmp_path / "inst.json", sio.instance_to_json(inst))
    spath = str(tmp_path / "sched.json")
    main(["plan", "--in", ipath, "--out", spath])
    steps = len(sio.schedule_from_json(json.loads(open(spath).read())))
    frames = tmp_path / "frames"
    assert main(["render", "--in", ipath, "--schedule", spath,
                 "--frames-dir", str(frames), "--animate"]) == 0
    assert len(list(frames.glob("frame_*.svg"))) == steps + 1
    assert (frames / "animation.svg").exists()


def test_render_zero_steps_single_frame(tmp_path, identity_instance):
    spath = write(tmp_path / "empty.json", sio.schedule_to_json([]))
    frames = tmp_path / "frames"
    assert main(["render", "--in", identity_instance, "--schedule", spath,
                 "--frames-dir", str(frames)]) == 0
    assert len(list(frames.glob("frame_*.svg"))) == 1


def test_gen_sat_pipeline(tmp_path, capsys):
    formula = {"clauses": [[1, 2, 3], [-1, -2, -3]], "variables": 3,
               "assignment": [True, False, False]}
    fpath = write(tmp_path / "formula.json", formula)
    ipath = str(tmp_path / "inst.json")
    wpath = str(tmp_path / "witness.json")
    assert main(["gen", "sat", "--in", fpath, "--out", ipath,
                 "--witness", wpath]) == 0
    assert "critical makespan 72" in capsys.readouterr().out
    assert main(["validate", "--in", ipath, "--schedule", wpath]) == 0
    assert "makespan 72" in capsys.readouterr().out


def test_plan_continuous_roundtrip(tmp_path):
    doc = sio.continuous_to_json(
        {0: (0.0, 0.0), 1: (10.0, 0.0)}, {0: (10.0, 0.0), 1: (0.0, 0.0)}
    )
    ipath = write(tmp_path / "cont.json", doc)
    tpath = str(tmp_path / "traj.json")
    assert main(["plan-continuous", "--mode", "separated",
                 "--in", ipath, "--out", tpath]) == 0
    assert main(["validate", "--in", ipath, "--schedule", tpath]) == 0


def test_plan_colored(tmp_path, capsys):
    cells_src = [[1 if (x + y) % 3 == 0 else 2 for x in range(8)]
                 for y in range(8)]
    cells_dst = [list(reversed(row)) for row in reversed(cells_src)]
    spath = write(tmp_path / "src.json",
                  sio.image_to_json(GridDims(8, 8), cells_src))
    dpath = write(tmp_path / "dst.json",
                  sio.image_to_json(GridDims(8, 8), cells_dst))
    out = str(tmp_path / "sched.json")
    assert main(["plan-colored", "--in", spath, "--target", dpath,
                 "--out", out]) == 0
    assert "makespan" in capsys.readouterr().out


def test_oracle_command(tmp_path, capsys):
    inst = Instance(GridDims(3, 3), {0: (0, 0)}, {0: (2, 2)})
    ipath = write(tmp_path / "inst.json", sio.instance_to_json(inst))
    assert main(["oracle", "--in", ipath]) == 0
    assert capsys.readouterr().out.strip() == "4"


def test_stats_empty_corpus(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    out = tmp_path / "stats.csv"
    assert main(["stats", "--corpus", str(corpus), "--out", str(out)]) == 0
    assert out.read_text().strip() == "instance,kind,robots,makespan,d,ratio"


def test_stats_corpus(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for seed in range(3):
        inst = gen_random(GridDims(12, 12), 8, 3, seed=seed)
        write(corpus / f"inst{seed}.json", sio.instance_to_json(inst))
    out = tmp_path / "stats.csv"
    assert main(["stats", "--corpus", str(corpus), "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 4

import json

import pytest
from hypothesis import given, strategies as st

from swarmplan import io
from swarmplan.grid import GridDims, Instance


def sample_instance():
    return Instance(GridDims(4, 3), {0: (0, 0), 1: (3, 2)}, {0: (3, 2), 1: (0, 0)})


def test_instance_round_trip():
    inst = sample_instance()
    blob = io.instance_to_json(inst, colors={0: 1, 1: 2})
    inst2, colors = io.instance_from_json(blob)
    assert inst2 == inst
    assert colors == {0: 1, 1: 2}


def test_instance_without_colors():
    blob = io.instance_to_json(sample_instance())
    inst2, colors = io.instance_from_json(blob)
    assert colors is None
    assert inst2 == sample_instance()


def test_instance_rejects_bad_format():
    blob = io.instance_to_json(sample_instance())
    blob["format"] = "something-else"
    with pytest.raises(io.FormatError):
        io.instance_from_json(blob)


def test_schedule_round_trip():
    sched = [{0: "E", 1: "W"}, {}, {0: "N"}]
    blob = io.schedule_to_json(sched)
    assert io.schedule_from_json(blob) == sched


def test_schedule_rejects_bad_move():
    blob = io.schedule_to_json([{0: "E"}])
    blob["steps"][0]["0"] = "Q"
    with pytest.raises(io.FormatError):
        io.schedule_from_json(blob)


def test_image_round_trip():
    cells = [[0, 1, 0], [1, 1, 0]]
    blob = io.image_to_json(GridDims(3, 2), cells)
    dims, cells2 = io.image_from_json(blob)
    assert dims == GridDims(3, 2)
    assert cells2 == cells


def test_image_rejects_dim_mismatch():
    blob = io.image_to_json(GridDims(3, 2), [[0, 1, 0], [1, 1, 0]])
    blob["dims"] = [2, 2]
    with pytest.raises(io.FormatError):
        io.image_from_json(blob)


def test_trajectories_round_trip():
    trajs = {0: [(0.0, (1.0, 2.0)), (1.5, (2.0, 2.0))]}
    blob = io.trajectories_to_json(trajs)
    assert io.trajectories_from_json(blob) == trajs


def test_continuous_round_trip():
    starts = {0: (0.5, 1.5), 1: (4.0, 4.0)}
    targets = {0: (4.0, 4.0), 1: (0.5, 1.5)}
    blob = io.continuous_to_json(starts, targets)
    s2, t2 = io.continuous_from_json(blob)
    assert s2 == starts and t2 == targets


def test_dump_load_path(tmp_path):
    path = str(tmp_path / "inst.json")
    io.dump(io.instance_to_json(sample_instance()), path)
    inst2, _ = io.instance_from_json(io.load(path))
    assert inst2 == sample_instance()
    # file content is plain json
    with open(path) as fh:
        assert json.load(fh)["format"] == io.INSTANCE_FORMAT


cells_st = st.tuples(st.integers(0, 7), st.integers(0, 7))


@given(st.data())
def test_instance_round_trip_property(data):
    cells = data.draw(st.lists(cells_st, min_size=1, max_size=12, unique=True))
    perm = data.draw(st.permutations(cells))
    inst = Instance(GridDims(8, 8), dict(enumerate(cells)), dict(enumerate(perm)))
    inst2, _ = io.instance_from_json(io.instance_to_json(inst))
    assert inst2 == inst


@given(st.lists(st.dictionaries(st.integers(0, 20), st.sampled_from("NESW."), max_size=5), max_size=8))
def test_schedule_round_trip_property(sched):
    assert io.schedule_from_json(io.schedule_to_json(sched)) == sched

"""Frozen regression constants and canonical seeds.

The values in ``regression.json`` were measured once on the shipped
generators and then frozen; the test suite treats them as regression
bounds, not as theoretical constants.  Regenerate with
``scripts/measure_constants.py`` if an algorithm change shifts them.
"""

from __future__ import annotations

import json
from importlib import resources


def load_regression() -> dict:
    with resources.files(__package__).joinpath("regression.json").open() as fh:
        return json.load(fh)

"""Shared fixtures: small scenarios that keep simulation tests fast."""

import pytest

from cocarry.scenario import parse_scenario

# Empty room with a close finish line: reaches "finish" in about 3 s.
MINI_YAML = """
version: 1
name: mini
room: {x_min: -1.6, x_max: 4.0, y_min: -1.5, y_max: 1.5}
robot_start: {x: 0.0, y: 0.0, heading: 0.0}
finish_offset: 0.8
timeout: 30.0
"""

# Same room with a block straight ahead: the carried box hits it early.
MINI_BLOCK_YAML = """
version: 1
name: mini_block
room: {x_min: -1.6, x_max: 4.0, y_min: -1.5, y_max: 1.5}
robot_start: {x: 0.0, y: 0.0, heading: 0.0}
finish_offset: 3.0
timeout: 30.0
obstacles:
  - {x: 2.6, y: 0.0, length: 0.6, width: 0.8}
"""


@pytest.fixture
def mini_spec():
    return parse_scenario(MINI_YAML)


@pytest.fixture
def mini_block_spec():
    return parse_scenario(MINI_BLOCK_YAML)

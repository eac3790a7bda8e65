import math

import numpy as np
import pytest

from hybridpkm import MachineParams, Pose, center_contains, check_cube, workspace_contains
from hybridpkm.workspace import JOINT_LIMIT, NO_REAL_IK, TILT, cube_grid, tip_of, wrist_center_of

from conftest import home_pose


def test_home_inside(params):
    assert workspace_contains(home_pose(params), params)


def test_reasons(params):
    assert workspace_contains(Pose(math.radians(50), 0, 0, 0, 0), params).reason == TILT
    assert workspace_contains(Pose(0, 0, 0, 0.9, 0.9), params).reason == NO_REAL_IK
    assert center_contains((0.6, 0.0, 0.0), params).reason == JOINT_LIMIT


def test_tip_center_distance(params, rng):
    for a, b in rng.uniform(-math.pi / 4, math.pi / 4, (100, 2)):
        pose = Pose(a, b, *rng.uniform(-0.2, 0.2, 3))
        c = wrist_center_of(pose, params)
        assert np.linalg.norm(np.subtract(pose[2:], c)) == pytest.approx(params.tool_length, rel=1e-12)
        assert tip_of(a, b, c, params) == pytest.approx(pose, abs=1e-15)


def test_cube_grid_shape():
    g = cube_grid(0.5, samples_per_edge=11)
    assert g.shape == (1331, 3)
    assert g.min(axis=0) == pytest.approx([0.0] * 3) and g.max(axis=0) == pytest.approx([0.5] * 3)


def test_default_cube_fully_inside(params):
    fraction, failures = check_cube(params, 0.5, (0.25, 0.25, 0.25), 11)
    assert fraction == 1.0 and failures == []


def test_large_cube_partly_outside(params):
    fraction, failures = check_cube(params, 2.0, (0.25, 0.25, 0.25), 5)
    assert fraction < 1.0 and failures


def test_narrow_rho_range_fails_cube():
    # a 0.8 m stroke cap cannot host the cube
    fraction, _ = check_cube(MachineParams(rho_limits=(0.05, 0.8)), 0.5, (0.25, 0.25, 0.25), 11)
    assert fraction < 1.0


def test_zero_edge_rejected(params):
    with pytest.raises(ValueError):
        check_cube(params, 0.0)

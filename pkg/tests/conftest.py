import math

import numpy as np
import pytest

from hybridpkm import MachineParams, Pose
from hybridpkm.workspace import workspace_contains


@pytest.fixture
def params():
    return MachineParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def home_pose(params):
    return Pose(0.0, 0.0, 0.0, 0.0, -params.tool_length)


def random_poses(rng, params, n, tilt=math.radians(40), box=0.2, center=(0.0, 0.0, 0.0)):
    """Poses with |alpha|, |beta| <= tilt and wrist centers in a box, all reachable."""
    out = []
    while len(out) < n:
        a, b = rng.uniform(-tilt, tilt, 2)
        c = np.asarray(center) + rng.uniform(-box, box, 3)
        u = (-math.sin(b), math.sin(a) * math.cos(b), -math.cos(a) * math.cos(b))
        p = Pose(a, b, *(c + params.tool_length * np.array(u)))
        if workspace_contains(p, params):
            out.append(p)
    return out

"""Tool-tip / wrist-center conversion and workspace membership."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import NoRealSolution
from .model import MachineParams, Pose
from .translation import DEFAULT_WORKING_MODE, ik_translation

TILT = "tilt"
NO_REAL_IK = "no-real-IK"
JOINT_LIMIT = "joint-limit"


class WorkspaceCheck(NamedTuple):
    inside: bool
    reason: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.inside


def wrist_center_of(pose, params: MachineParams):
    """Wrist center ``tip - l * u(alpha, beta)`` for a tool-tip pose."""
    alpha, beta, x, y, z = pose
    l = params.tool_length
    cb = math.cos(beta)
    return np.array([
        x + l * math.sin(beta),
        y - l * math.sin(alpha) * cb,
        z + l * math.cos(alpha) * cb,
    ])


def tip_of(alpha, beta, center, params: MachineParams) -> Pose:
    l = params.tool_length
    cb = math.cos(beta)
    return Pose(alpha, beta,
                center[0] - l * math.sin(beta),
                center[1] + l * math.sin(alpha) * cb,
                center[2] - l * math.cos(alpha) * cb)


def center_contains(center, params: MachineParams, mode=DEFAULT_WORKING_MODE) -> WorkspaceCheck:
    """Reachability and joint-limit check for a wrist-center position."""
    try:
        rho = ik_translation(center, params, mode)
    except NoRealSolution as exc:
        return WorkspaceCheck(False, NO_REAL_IK, str(exc))
    lo, hi = params.rho_limits
    for i, r in enumerate(rho, start=1):
        if not lo <= r <= hi:
            return WorkspaceCheck(False, JOINT_LIMIT, f"rho{i} = {r:.6g} m outside [{lo:g}, {hi:g}]")
    return WorkspaceCheck(True)


def workspace_contains(pose, params: MachineParams, mode=DEFAULT_WORKING_MODE) -> WorkspaceCheck:
    alpha, beta = pose[0], pose[1]
    if abs(alpha) > params.tilt_limit or abs(beta) > params.tilt_limit:
        return WorkspaceCheck(False, TILT,
                              f"tilt ({math.degrees(alpha):.3f}, {math.degrees(beta):.3f}) deg "
                              f"exceeds {math.degrees(params.tilt_limit):.3f} deg")
    return center_contains(wrist_center_of(pose, params), params, mode)


def cube_grid(edge, center=(0.25, 0.25, 0.25), samples_per_edge=11):
    """``samples_per_edge**3`` points filling an axis-aligned cube."""
    ticks = np.linspace(-edge / 2, edge / 2, samples_per_edge)
    gx, gy, gz = np.meshgrid(ticks + center[0], ticks + center[1], ticks + center[2], indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])


def check_cube(params: MachineParams, edge=0.5, center=(0.25, 0.25, 0.25), samples_per_edge=11):
    """Fraction of cube grid wrist-center points inside the workspace, plus failures."""
    if not edge > 0:
        raise ValueError("cube edge must be positive")
    if samples_per_edge < 2:
        raise ValueError("need at least 2 samples per edge")
    pts = cube_grid(edge, center, samples_per_edge)
    failures = []
    for p in pts:
        res = center_contains(p, params)
        if not res:
            failures.append((p, res))
    return 1.0 - len(failures) / len(pts), failures

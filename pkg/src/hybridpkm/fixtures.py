"""Reference poses of the standard test trajectories (tool-tip coordinates)."""

import math

from .model import Pose
from .trajectory import CircleSpec

# alpha, beta in degrees; x, y, z in mm
TABLE1_MM_DEG = {
    "P1": (0, 0, 0, 0, -72),
    "P2": (20, 0, 140, 130, 60),
    "P3": (0, 20, -240, -230, -180),
    "P4": (0, 0, 0, 0, -72),
}

TABLE2_MM_DEG = {
    "P1": (0, 0, 0, 0, -72),
    "PC": (0, 0, 10, 10, 10),
    "P4": (0, 0, 0, 0, -72),
}

TABLE2_RADIUS = 0.030
TABLE2_ORIENTATIONS_DEG = {"A2": 20.0, "B2": 0.0, "A3": 0.0, "B3": 20.0}


def table1_pose(name) -> Pose:
    return Pose.from_mm_deg(*TABLE1_MM_DEG[name])


def table1_tour():
    return [table1_pose(n) for n in ("P1", "P2", "P3", "P4")]


def table2_circle(eta_min=0.0, eta_max=2 * math.pi, plane_alpha=0.0, plane_beta=0.0,
                  speed_ratio=1.0) -> CircleSpec:
    """The circle fixture; eta range and plane angles are not published and default to a full turn in z = const."""
    pc = Pose.from_mm_deg(*TABLE2_MM_DEG["PC"])
    o = {k: math.radians(v) for k, v in TABLE2_ORIENTATIONS_DEG.items()}
    return CircleSpec(center=pc.position, radius=TABLE2_RADIUS, eta_min=eta_min, eta_max=eta_max,
                      plane_alpha=plane_alpha, plane_beta=plane_beta,
                      a_start=o["A2"], b_start=o["B2"], a_end=o["A3"], b_end=o["B3"],
                      speed_ratio=speed_ratio)


def table2_entry() -> Pose:
    return Pose.from_mm_deg(*TABLE2_MM_DEG["P1"])


def table2_exit() -> Pose:
    return Pose.from_mm_deg(*TABLE2_MM_DEG["P4"])

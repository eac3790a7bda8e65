"""Closed-form kinematics of the 3-dof translational stage.

Each leg i keeps its parallelogram of length ``l_i`` between the prismatic
slider on axis i and the wrist center ``c``::

    (x - rho1)**2 + y**2 + z**2 = l1**2     (and cyclically for legs 2, 3)

so the inverse problem is a square root per leg (8 working modes) and the
direct problem reduces to one quadratic in ``w = |c|**2`` (2 assembly modes).
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np

from .errors import JointLimit, NoRealSolution, Singular, SingularInput
from .model import MachineParams

SINGULAR_TOL = 1e-9


class WorkingMode(NamedTuple):
    """Square-root branch per leg, each +1 or -1."""

    s1: int = 1
    s2: int = 1
    s3: int = 1

    @classmethod
    def all(cls):
        return [cls(*signs) for signs in itertools.product((1, -1), repeat=3)]

    @classmethod
    def parse(cls, text):
        """``"+++"``, ``"+-+"`` or ``"1,-1,1"``."""
        text = text.strip()
        if "," in text:
            signs = [int(float(s)) for s in text.split(",")]
        else:
            signs = [1 if ch == "+" else -1 if ch == "-" else 0 for ch in text]
        if len(signs) != 3 or any(s not in (1, -1) for s in signs):
            raise ValueError(f"bad working mode {text!r}")
        return cls(*signs)


DEFAULT_WORKING_MODE = WorkingMode(1, 1, 1)

# Assembly modes label the two roots of the w-quadratic by the side of the
# parallel singularity they sit on: the sign of det[c - rho_i e_i] (rows are
# the leg directions). -1 is the home side (legs orthogonal, det = -l1 l2 l3).
# With the default geometry the singular surface crosses the operating cube
# (on the diagonal at c = l / sqrt(6)), and both roots are (+,+,+) there, so
# the mode has to be matched to the configuration, see assembly_mode_of.
ASSEMBLY_MODES = (-1, 1)
DEFAULT_ASSEMBLY_MODE = -1


def ik_translation(p_center, params: MachineParams, mode=DEFAULT_WORKING_MODE,
                   check_limits=False):
    """Prismatic joint values ``(rho1, rho2, rho3)`` placing the wrist center at ``p_center``."""
    x, y, z = p_center
    l1, l2, l3 = params.leg_lengths
    s1, s2, s3 = mode
    d1 = l1 * l1 - y * y - z * z
    d2 = l2 * l2 - x * x - z * z
    d3 = l3 * l3 - x * x - y * y
    for leg, disc in enumerate((d1, d2, d3), start=1):
        if disc < 0.0:
            raise NoRealSolution(f"leg {leg}: wrist center out of reach", leg)
    rho = (x + s1 * math.sqrt(d1), y + s2 * math.sqrt(d2), z + s3 * math.sqrt(d3))
    if check_limits:
        check_joint_limits(rho, params)
    return rho


def check_joint_limits(rho, params: MachineParams):
    lo, hi = params.rho_limits
    for i, r in enumerate(rho, start=1):
        if not lo <= r <= hi:
            raise JointLimit(f"rho{i} = {r:.6g} m outside [{lo:g}, {hi:g}]", f"rho{i}")


def fk_translation_roots(rho, params: MachineParams):
    """Both solutions ``(p_small, p_large, coincident)`` ordered by ``|c|**2``.

    Substituting ``x = (w + rho1**2 - l1**2) / (2 rho1)`` (cyclically for y, z)
    into ``w = x**2 + y**2 + z**2`` gives ``a w**2 + b w + c = 0``.
    """
    for leg, r in enumerate(rho, start=1):
        if r == 0.0:
            raise SingularInput(f"rho{leg} = 0: direct kinematics undefined", leg)
    k = [ri * ri - li * li for ri, li in zip(rho, params.leg_lengths)]
    inv = [1.0 / (2.0 * ri) for ri in rho]
    a = sum(v * v for v in inv)
    b = 2.0 * sum(ki * v * v for ki, v in zip(k, inv)) - 1.0
    c = sum((ki * v) ** 2 for ki, v in zip(k, inv))
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NoRealSolution("direct kinematics has no real solution")
    sq = math.sqrt(disc)
    # cancellation-free pair of roots
    q = -0.5 * (b + math.copysign(sq, b))
    r1 = q / a
    r2 = c / q if q != 0.0 else r1
    w_small, w_large = min(r1, r2), max(r1, r2)

    def point(w):
        return np.array([(w + ki) * v for ki, v in zip(k, inv)])

    return point(w_small), point(w_large), disc == 0.0


def leg_determinant(center, rho) -> float:
    """``det`` of the leg-direction matrix; zero on the parallel singularity."""
    x, y, z = center
    a, b, c = x - rho[0], y - rho[1], z - rho[2]
    return a * b * c + 2.0 * x * y * z - a * y * z - b * x * z - c * x * y


def assembly_mode_of(center, rho) -> int:
    """Assembly mode (-1 or +1) of a wrist center / joint triple pair."""
    return 1 if leg_determinant(center, rho) > 0.0 else -1


def fk_translation(rho, params: MachineParams, mode=DEFAULT_ASSEMBLY_MODE, near=None):
    """Wrist-center position for joint values ``rho`` in the given assembly mode.

    With ``near`` given the root closest to that point is returned instead,
    which is how a tracking loop follows one branch across the singularity.
    """
    if mode not in ASSEMBLY_MODES:
        raise ValueError(f"assembly mode must be -1 or +1, got {mode!r}")
    p_small, p_large, _ = fk_translation_roots(rho, params)
    if near is not None:
        near = np.asarray(near, dtype=float)
        return min((p_small, p_large), key=lambda p: float(np.sum((p - near) ** 2)))
    return p_small if assembly_mode_of(p_small, rho) == mode else p_large


def inv_jacobian_translation(p_center, rho):
    """Inverse Jacobian mapping wrist-center velocity to prismatic joint rates."""
    x, y, z = p_center
    d1 = rho[0] - x
    d2 = rho[1] - y
    d3 = rho[2] - z
    for leg, d in enumerate((d1, d2, d3), start=1):
        if abs(d) < SINGULAR_TOL:
            raise Singular(f"leg {leg}: rho{leg} equals the center coordinate", leg, "translation")
    return np.array([
        [1.0, -y / d1, -z / d1],
        [-x / d2, 1.0, -z / d2],
        [-x / d3, -y / d3, 1.0],
    ])

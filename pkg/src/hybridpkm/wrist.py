"""Geometry of the 2-dof parallel spherical wrist."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import Singular

SINGULAR_TOL = 1e-9


class WristAngles(NamedTuple):
    theta1: float
    theta2: float


def tool_direction(alpha, beta):
    """Unit vector from the wrist center towards the tool tip."""
    cb = math.cos(beta)
    return np.array([-math.sin(beta), math.sin(alpha) * cb, -math.cos(alpha) * cb])


def ik_wrist(alpha, beta) -> WristAngles:
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    if abs(ca * cb) < SINGULAR_TOL:
        raise Singular("cos(alpha) cos(beta) vanishes", block="wrist")
    theta1 = -math.atan2(-sa * cb, ca * cb)
    theta2 = math.atan2(sb, ca * cb)
    return WristAngles(theta1, theta2)


def fk_wrist(theta) -> tuple:
    """``(alpha, beta)`` on the home branch (the one containing theta = 0)."""
    theta1, theta2 = theta
    c1 = math.cos(theta1)
    if abs(c1) < SINGULAR_TOL:
        raise Singular("cos(theta1) vanishes", block="wrist")
    # tan(beta) = tan(theta2) cos(theta1), written without tan() poles
    beta = math.atan2(math.sin(theta2) * c1, math.cos(theta2))
    return theta1, beta


def inv_jacobian_wrist(alpha, beta, theta):
    """2x2 map from ``(alpha_dot, beta_dot)`` to ``(theta1_dot, theta2_dot)``.

    Written in the actuated angles; ``alpha`` enters only through theta1 on
    the operating branch, so it is accepted for signature symmetry.
    """
    theta1, theta2 = theta
    s1, c1 = math.sin(theta1), math.cos(theta1)
    s2, c2 = math.sin(theta2), math.cos(theta2)
    sb, cb = math.sin(beta), math.cos(beta)
    den = sb * s2 + c1 * cb * c2
    if abs(den) < SINGULAR_TOL:
        raise Singular("wrist Jacobian denominator vanishes", block="wrist")
    return np.array([
        [1.0, 0.0],
        [s2 * s1 * cb / den, (sb * c1 * s2 + c2 * cb) / den],
    ])

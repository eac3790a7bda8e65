"""Full 5-dof kinematics of the hybrid machine.

Joint order is ``(theta1, theta2, rho1, rho2, rho3)`` and twist order is
``(alpha_dot, beta_dot, x_dot, y_dot, z_dot)`` with (x, y, z) the tool tip.
The inverse Jacobian has the block form::

    [[ J_A,  0  ],
     [ K,    J_O]]

where ``J_A`` is the wrist block, ``J_O`` the translational block (written in
wrist-center coordinates) and ``K = J_O @ M`` the coupling block, ``M`` being
the wrist-center velocity induced by rotating the tool about its tip.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernel
from .errors import NoRealSolution, Singular, TiltLimit
from .model import JointState, MachineParams, Pose, Twist
from .translation import (DEFAULT_ASSEMBLY_MODE, DEFAULT_WORKING_MODE, assembly_mode_of, fk_translation,
                          ik_translation)
from .wrist import fk_wrist, ik_wrist
from .workspace import tip_of, wrist_center_of

SINGULAR_TOL = 1e-9
_sin, _cos = math.sin, math.cos


def _check_tilt(alpha, beta, params):
    if abs(alpha) > params.tilt_limit or abs(beta) > params.tilt_limit:
        raise TiltLimit(
            f"tilt limit exceeded: alpha={math.degrees(alpha):.3f} deg, "
            f"beta={math.degrees(beta):.3f} deg, limit {math.degrees(params.tilt_limit):.3f} deg")


def ik_full(pose, params: MachineParams, mode=DEFAULT_WORKING_MODE, check_limits=False) -> JointState:
    """Wrist angles first, then the translational stage at the wrist center."""
    alpha, beta = pose[0], pose[1]
    _check_tilt(alpha, beta, params)
    theta1, theta2 = ik_wrist(alpha, beta)
    rho = ik_translation(_center(pose, params.tool_length), params, mode, check_limits=check_limits)
    return JointState(theta1, theta2, *rho)


def fk_full(q, params: MachineParams, mode=DEFAULT_ASSEMBLY_MODE, near=None) -> Pose:
    """Tool pose for joint values. ``near`` (a pose) picks the closer branch instead of ``mode``."""
    hint = None if near is None else _center(near, params.tool_length)
    center = fk_translation(q[2:5], params, mode, near=hint)
    alpha, beta = fk_wrist(q[0:2])
    return tip_of(alpha, beta, center, params)


def pose_assembly_mode(pose, params: MachineParams, mode=DEFAULT_WORKING_MODE) -> int:
    """Assembly mode that recovers ``pose`` from its own joint values."""
    center = _center(pose, params.tool_length)
    return assembly_mode_of(center, ik_translation(center, params, mode))


def _denominators(center, rho):
    d1 = rho[0] - center[0]
    d2 = rho[1] - center[1]
    d3 = rho[2] - center[2]
    for leg, d in enumerate((d1, d2, d3), start=1):
        if abs(d) < SINGULAR_TOL:
            raise Singular(f"leg {leg}: rho{leg} equals the wrist-center coordinate", leg, "coupling")
    return d1, d2, d3


def coupling_jacobian(pose, rho, params: MachineParams):
    """3x2 block mapping ``(alpha_dot, beta_dot)`` to prismatic rates.

    Evaluated at the wrist center; it already contains the translational
    inverse Jacobian, which is why the full matrix uses it as is.
    """
    alpha, beta = pose[0], pose[1]
    x, y, z = wrist_center_of(pose, params)
    d1, d2, d3 = _denominators((x, y, z), rho)
    l = params.tool_length
    ca, sa, cb, sb = _cos(alpha), _sin(alpha), _cos(beta), _sin(beta)
    return np.array([
        [y * l * ca * cb / d1 + z * l * sa * cb / d1,
         l * cb - y * l * sa * sb / d1 + z * l * ca * sb / d1],
        [-l * ca * cb + z * l * sa * cb / d2,
         -x * l * cb / d2 + l * sa * sb + z * l * ca * sb / d2],
        [y * l * ca * cb / d3 - l * sa * cb,
         -x * l * cb / d3 - y * l * sa * sb / d3 - l * ca * sb],
    ])


def center_velocity_coupling(alpha, beta, tool_length):
    """Wrist-center velocity per unit ``(alpha_dot, beta_dot)`` at fixed tip (3x2)."""
    l = tool_length
    ca, sa, cb, sb = _cos(alpha), _sin(alpha), _cos(beta), _sin(beta)
    return np.array([
        [0.0, l * cb],
        [-l * ca * cb, l * sa * sb],
        [-l * sa * cb, -l * ca * sb],
    ])


def _raise_for(status):
    if status == _kernel.WRIST_SINGULAR:
        raise Singular("wrist Jacobian denominator vanishes", block="wrist")
    if _kernel.LEG_SINGULAR <= status < _kernel.NO_REAL_IK:
        leg = status - _kernel.LEG_SINGULAR + 1
        raise Singular(f"leg {leg}: rho{leg} equals the wrist-center coordinate", leg, "translation")
    leg = status - _kernel.NO_REAL_IK + 1
    raise NoRealSolution(f"leg {leg}: wrist center out of reach", leg)


def _center(pose, l):
    alpha, beta, x, y, z = pose
    cb = _cos(beta)
    return x + l * _sin(beta), y - l * _sin(alpha) * cb, z + l * _cos(alpha) * cb


def _jacobians(pose, q, twist, params):
    l = params.tool_length
    x, y, z = _center(pose, l)
    if twist is None:
        ad = bd = xd = yd = zd = 0.0
    else:
        ad, bd, xd, yd, zd = twist
    status, J, Jd = _kernel.jacobians(float(pose[0]), float(pose[1]), float(q[1]), x, y, z,
                                      float(q[2]), float(q[3]), float(q[4]), l,
                                      float(ad), float(bd), float(xd), float(yd), float(zd),
                                      twist is not None)
    if status:
        _raise_for(status)
    return J, Jd


def full_inv_jacobian(pose, q, params: MachineParams):
    """5x5 matrix with ``q_dot = J_inv @ twist``."""
    return _jacobians(pose, q, None, params)[0]


def full_inv_jacobian_dot(pose, q, twist, params: MachineParams):
    """Time derivative of :func:`full_inv_jacobian` while the tool moves with ``twist``.

    Obtained by differentiating every closed-form entry (chain rule through
    theta2, the wrist center and the prismatic joints), not numerically.
    """
    return _jacobians(pose, q, twist, params)[1]


def evaluate_cycle(pose, twist, params: MachineParams, mode=DEFAULT_WORKING_MODE):
    """Joint values, inverse Jacobian and its rate for one control cycle.

    Same results as ``ik_full`` + ``full_inv_jacobian`` + ``full_inv_jacobian_dot``
    in a single compiled call. Returns ``(q, J_inv, J_inv_dot)`` with ``q`` an array.
    """
    alpha, beta, px, py, pz = pose
    _check_tilt(alpha, beta, params)
    l1, l2, l3 = params.leg_lengths
    ad, bd, xd, yd, zd = twist
    status, q, J, Jd = _kernel.cycle(float(alpha), float(beta), float(px), float(py), float(pz),
                                     float(ad), float(bd), float(xd), float(yd), float(zd),
                                     params.tool_length, l1, l2, l3, mode[0], mode[1], mode[2])
    if status:
        _raise_for(status)
    return q, J, Jd


def project_rates(pose, q, V, A, params: MachineParams):
    """Joint velocity ``J_inv V`` and acceleration ``J_inv A + J_inv_dot V``."""
    J, Jd = _jacobians(pose, q, V, params)
    V = np.asarray(V, dtype=float)
    return J @ V, J @ np.asarray(A, dtype=float) + Jd @ V


def twist_of(values) -> Twist:
    return Twist(*map(float, values))

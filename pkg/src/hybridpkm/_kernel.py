"""Compiled scalar core of the per-cycle kinematics.

Kernels return an integer status instead of raising so they stay cheap to
call from the control loop; :mod:`hybridpkm.hybrid` maps statuses to
exceptions.
"""

import math

import numpy as np
from numba import njit

OK = 0
WRIST_SINGULAR = 1
LEG_SINGULAR = 2      # 2, 3, 4 -> leg 1, 2, 3
NO_REAL_IK = 5        # 5, 6, 7 -> leg 1, 2, 3

SINGULAR_TOL = 1e-9


@njit(cache=True)
def jacobians(alpha, beta, theta2, x, y, z, r1, r2, r3, l, ad, bd, xd, yd, zd, want_dot):
    """Fill the inverse Jacobian and (optionally) its rate at wrist center (x, y, z)."""
    J = np.zeros((5, 5))
    Jd = np.zeros((5, 5))
    ca = math.cos(alpha); sa = math.sin(alpha)
    cb = math.cos(beta); sb = math.sin(beta)
    c2 = math.cos(theta2); s2 = math.sin(theta2)

    den = sb * s2 + ca * cb * c2
    if abs(den) < SINGULAR_TOL:
        return WRIST_SINGULAR, J, Jd
    d1 = r1 - x; d2 = r2 - y; d3 = r3 - z
    if abs(d1) < SINGULAR_TOL:
        return LEG_SINGULAR, J, Jd
    if abs(d2) < SINGULAR_TOL:
        return LEG_SINGULAR + 1, J, Jd
    if abs(d3) < SINGULAR_TOL:
        return LEG_SINGULAR + 2, J, Jd

    n1 = s2 * sa * cb
    n2 = ca * sb * s2 + c2 * cb
    a21 = n1 / den
    a22 = n2 / den

    # translational block, off-diagonal o_ij = -c_j / d_i
    o12 = -y / d1; o13 = -z / d1
    o21 = -x / d2; o23 = -z / d2
    o31 = -x / d3; o32 = -y / d3

    # wrist-center velocity per unit angle rate with the tip held fixed
    m21 = -l * ca * cb; m31 = -l * sa * cb
    m12 = l * cb; m22 = l * sa * sb; m32 = -l * ca * sb

    J[0, 0] = 1.0
    J[1, 0] = a21; J[1, 1] = a22
    J[2, 0] = o12 * m21 + o13 * m31
    J[2, 1] = m12 + o12 * m22 + o13 * m32
    J[3, 0] = m21 + o23 * m31
    J[3, 1] = o21 * m12 + m22 + o23 * m32
    J[4, 0] = o32 * m21 + m31
    J[4, 1] = o31 * m12 + o32 * m22 + m32
    J[2, 2] = 1.0; J[2, 3] = o12; J[2, 4] = o13
    J[3, 2] = o21; J[3, 3] = 1.0; J[3, 4] = o23
    J[4, 2] = o31; J[4, 3] = o32; J[4, 4] = 1.0
    if not want_dot:
        return OK, J, Jd

    t2d = a21 * ad + a22 * bd

    n1d = c2 * t2d * sa * cb + s2 * ca * ad * cb - s2 * sa * sb * bd
    n2d = (-sa * ad * sb * s2 + ca * cb * bd * s2 + ca * sb * c2 * t2d
           - s2 * t2d * cb - c2 * sb * bd)
    dend = (cb * bd * s2 + sb * c2 * t2d - sa * ad * cb * c2
            - ca * sb * bd * c2 - ca * cb * s2 * t2d)
    Jd[1, 0] = (n1d - a21 * dend) / den
    Jd[1, 1] = (n2d - a22 * dend) / den

    xcd = xd + m12 * bd
    ycd = yd + m21 * ad + m22 * bd
    zcd = zd + m31 * ad + m32 * bd
    m21d = l * (sa * ad * cb + ca * sb * bd)
    m31d = l * (-ca * ad * cb + sa * sb * bd)
    m12d = -l * sb * bd
    m22d = l * (ca * ad * sb + sa * cb * bd)
    m32d = l * (sa * ad * sb - ca * cb * bd)

    # d(rho_i - c_i)/dt
    d1d = o12 * ycd + o13 * zcd
    d2d = o21 * xcd + o23 * zcd
    d3d = o31 * xcd + o32 * ycd

    o12d = (-ycd - o12 * d1d) / d1; o13d = (-zcd - o13 * d1d) / d1
    o21d = (-xcd - o21 * d2d) / d2; o23d = (-zcd - o23 * d2d) / d2
    o31d = (-xcd - o31 * d3d) / d3; o32d = (-ycd - o32 * d3d) / d3

    Jd[2, 0] = o12d * m21 + o12 * m21d + o13d * m31 + o13 * m31d
    Jd[2, 1] = m12d + o12d * m22 + o12 * m22d + o13d * m32 + o13 * m32d
    Jd[3, 0] = m21d + o23d * m31 + o23 * m31d
    Jd[3, 1] = o21d * m12 + o21 * m12d + m22d + o23d * m32 + o23 * m32d
    Jd[4, 0] = o32d * m21 + o32 * m21d + m31d
    Jd[4, 1] = o31d * m12 + o31 * m12d + o32d * m22 + o32 * m22d + m32d
    Jd[2, 3] = o12d; Jd[2, 4] = o13d
    Jd[3, 2] = o21d; Jd[3, 4] = o23d
    Jd[4, 2] = o31d; Jd[4, 3] = o32d
    return OK, J, Jd


@njit(cache=True)
def cycle(alpha, beta, px, py, pz, ad, bd, xd, yd, zd, l, l1, l2, l3, s1, s2, s3):
    """Inverse kinematics of a tip pose followed by :func:`jacobians`."""
    q = np.zeros(5)
    ca = math.cos(alpha); sa = math.sin(alpha)
    cb = math.cos(beta); sb = math.sin(beta)
    if abs(ca * cb) < SINGULAR_TOL:
        return WRIST_SINGULAR, q, np.zeros((5, 5)), np.zeros((5, 5))
    q[0] = -math.atan2(-sa * cb, ca * cb)
    q[1] = math.atan2(sb, ca * cb)
    x = px + l * sb
    y = py - l * sa * cb
    z = pz + l * ca * cb
    e1 = l1 * l1 - y * y - z * z
    e2 = l2 * l2 - x * x - z * z
    e3 = l3 * l3 - x * x - y * y
    if e1 < 0.0:
        return NO_REAL_IK, q, np.zeros((5, 5)), np.zeros((5, 5))
    if e2 < 0.0:
        return NO_REAL_IK + 1, q, np.zeros((5, 5)), np.zeros((5, 5))
    if e3 < 0.0:
        return NO_REAL_IK + 2, q, np.zeros((5, 5)), np.zeros((5, 5))
    q[2] = x + s1 * math.sqrt(e1)
    q[3] = y + s2 * math.sqrt(e2)
    q[4] = z + s3 * math.sqrt(e3)
    status, J, Jd = jacobians(alpha, beta, q[1], x, y, z, q[2], q[3], q[4], l,
                              ad, bd, xd, yd, zd, True)
    return status, q, J, Jd

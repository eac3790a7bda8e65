import math

import numpy as np
import pytest

from hybridpkm import (MachineParams, NoRealSolution, Pose, TiltLimit, coupling_jacobian, evaluate_cycle,
                       fk_full, full_inv_jacobian, full_inv_jacobian_dot, ik_full, pose_assembly_mode)
from hybridpkm.hybrid import center_velocity_coupling, project_rates
from hybridpkm.translation import inv_jacobian_translation
from hybridpkm.workspace import wrist_center_of

from conftest import home_pose, random_poses

L = 0.75


def _fd_jacobian(pose, params, h=1e-7):
    cols = []
    for e in np.eye(5):
        qp = np.array(ik_full(np.asarray(pose) + h * e, params))
        qm = np.array(ik_full(np.asarray(pose) - h * e, params))
        cols.append((qp - qm) / (2 * h))
    return np.column_stack(cols)


def test_home_ik_fk(params):
    home = home_pose(params)
    assert ik_full(home, params) == (0.0, 0.0, L, L, L)
    assert fk_full((0.0, 0.0, L, L, L), params) == pytest.approx(home, abs=1e-15)


def test_tilt_limit(params):
    with pytest.raises(TiltLimit, match="tilt limit exceeded"):
        ik_full(Pose(math.radians(60), 0.0, 0.0, 0.0, -0.09), params)


def test_unreachable(params):
    with pytest.raises(NoRealSolution):
        ik_full(Pose(0.0, 0.0, 0.0, 0.9, 0.9), params)


def test_home_full_jacobian(params):
    l = params.tool_length
    J = full_inv_jacobian(home_pose(params), ik_full(home_pose(params), params), params)
    expected = np.array([
        [1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [0, l, 1, 0, 0],
        [-l, 0, 0, 1, 0],
        [0, 0, 0, 0, 1],
    ], dtype=float)
    assert np.allclose(J, expected, atol=1e-15)


def test_home_coupling_block(params):
    l = params.tool_length
    K = coupling_jacobian(home_pose(params), (L, L, L), params)
    assert np.allclose(K, [[0, l], [-l, 0], [0, 0]], atol=1e-15)


def test_coupling_equals_translational_times_center_velocity(params, rng):
    for pose in random_poses(rng, params, 30):
        q = ik_full(pose, params)
        c = wrist_center_of(pose, params)
        K = coupling_jacobian(pose, q[2:], params)
        expected = inv_jacobian_translation(c, q[2:]) @ center_velocity_coupling(pose[0], pose[1],
                                                                                 params.tool_length)
        assert np.allclose(K, expected, rtol=1e-12, atol=1e-14)
        J = full_inv_jacobian(pose, q, params)
        assert np.allclose(J[2:, :2], K, rtol=1e-12, atol=1e-14)
        assert np.array_equal(J[:2, 2:], np.zeros((2, 3)))


def test_rotation_about_tip_moves_prismatic_joints(params):
    qd = full_inv_jacobian(home_pose(params), (0, 0, L, L, L), params) @ [1.0, 0, 0, 0, 0]
    assert qd[2:] == pytest.approx([0.0, -params.tool_length, 0.0], abs=1e-15)


def test_jacobian_matches_finite_difference(params, rng):
    for pose in random_poses(rng, params, 50):
        J = full_inv_jacobian(pose, ik_full(pose, params), params)
        fd = _fd_jacobian(pose, params)
        assert np.max(np.abs(J - fd)) / np.max(np.abs(fd)) < 1e-6


def _integrate(pose, twist, dt):
    """Pose after moving with constant twist for dt (pose is linear in the twist)."""
    return np.asarray(pose) + dt * np.asarray(twist)


def test_jacobian_dot_matches_time_difference(params, rng):
    h = 1e-6
    for pose in random_poses(rng, params, 50):
        twist = np.concatenate([rng.uniform(-2, 2, 2), rng.uniform(-1, 1, 3)])
        q = ik_full(pose, params)
        Jd = full_inv_jacobian_dot(pose, q, twist, params)
        pp, pm = _integrate(pose, twist, h), _integrate(pose, twist, -h)
        fd = (full_inv_jacobian(pp, ik_full(pp, params), params)
              - full_inv_jacobian(pm, ik_full(pm, params), params)) / (2 * h)
        assert np.max(np.abs(Jd - fd)) / max(np.max(np.abs(fd)), 1e-3) < 1e-5


def test_home_vertical_motion(params):
    home = home_pose(params)
    q = ik_full(home, params)
    qd, qdd = project_rates(home, q, [0, 0, 0, 0, 1.0], np.zeros(5), params)
    assert qd == pytest.approx([0, 0, 0, 0, 1.0], abs=1e-15)
    # second-order check: rho follows the exact IK along z(t) = z0 + t
    h = 1e-4
    rho = [ik_full(Pose(0, 0, 0, 0, home.z + s), params) for s in (-h, 0.0, h)]
    fd = (np.array(rho[2]) - 2 * np.array(rho[1]) + np.array(rho[0])) / h ** 2
    assert np.allclose(qdd, fd, atol=1e-5)


def test_evaluate_cycle_matches_separate_calls(params, rng):
    for pose in random_poses(rng, params, 20):
        twist = rng.uniform(-1, 1, 5)
        q, J, Jd = evaluate_cycle(pose, twist, params)
        q_ref = ik_full(pose, params)
        assert np.allclose(q, q_ref, rtol=0, atol=1e-15)
        assert np.array_equal(J, full_inv_jacobian(pose, q_ref, params))
        assert np.array_equal(Jd, full_inv_jacobian_dot(pose, q_ref, twist, params))


def test_evaluate_cycle_errors(params):
    with pytest.raises(TiltLimit):
        evaluate_cycle(Pose(1.0, 0, 0, 0, 0), np.zeros(5), params)
    with pytest.raises(NoRealSolution):
        evaluate_cycle(Pose(0, 0, 0, 0.9, 0.9), np.zeros(5), params)


def test_round_trip_random(params, rng):
    for pose in random_poses(rng, params, 200):
        back = fk_full(ik_full(pose, params), params)
        assert np.max(np.abs(np.subtract(back[2:], pose[2:]))) < 1e-9
        assert np.max(np.abs(np.subtract(back[:2], pose[:2]))) < 1e-12


def test_round_trip_whole_cube_with_matched_mode(params, rng):
    poses = random_poses(rng, params, 300, box=0.25, center=(0.25, 0.25, 0.25))
    modes = [pose_assembly_mode(p, params) for p in poses]
    assert -1 in modes and 1 in modes
    for pose, mode in zip(poses, modes):
        back = fk_full(ik_full(pose, params), params, mode)
        assert np.max(np.abs(np.subtract(back, pose))) < 1e-9
        assert np.allclose(fk_full(ik_full(pose, params), params, near=pose), back, atol=1e-15)


def test_custom_legs_round_trip(rng):
    params = MachineParams(leg_lengths=(0.7, 0.75, 0.8), tool_length=0.1)
    for pose in random_poses(rng, params, 50, box=0.15):
        back = fk_full(ik_full(pose, params), params)
        assert np.allclose(back, pose, atol=1e-10)

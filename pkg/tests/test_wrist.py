import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridpkm import Singular, fk_wrist, ik_wrist, inv_jacobian_wrist, tool_direction

TILT = math.pi / 4


def test_home():
    assert ik_wrist(0.0, 0.0) == (0.0, 0.0)
    assert fk_wrist((0.0, 0.0)) == (0.0, 0.0)
    assert np.array_equal(tool_direction(0.0, 0.0), [-0.0, 0.0, -1.0])


def test_pure_alpha_drives_theta1_only():
    t1, t2 = ik_wrist(0.3, 0.0)
    assert t1 == pytest.approx(0.3, abs=1e-15) and t2 == 0.0


def test_pure_beta_drives_theta2_only():
    t1, t2 = ik_wrist(0.0, 0.3)
    assert t1 == 0.0 and t2 == pytest.approx(0.3, abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(st.floats(-TILT, TILT), st.floats(-TILT, TILT))
def test_round_trip(a, b):
    ra, rb = fk_wrist(ik_wrist(a, b))
    assert abs(ra - a) < 1e-12 and abs(rb - b) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-TILT, TILT), st.floats(-TILT, TILT))
def test_direction_unit(a, b):
    assert np.linalg.norm(tool_direction(a, b)) == pytest.approx(1.0, abs=1e-15)


def test_singular_ik():
    with pytest.raises(Singular):
        ik_wrist(math.pi / 2, 0.0)


def test_jacobian_home_identity():
    assert np.array_equal(inv_jacobian_wrist(0.0, 0.0, (0.0, 0.0)), np.eye(2))


def test_jacobian_finite_difference(rng):
    h = 1e-7
    for _ in range(50):
        a, b = rng.uniform(-0.7, 0.7, 2)
        J = inv_jacobian_wrist(a, b, ik_wrist(a, b))
        fd = np.column_stack([
            (np.array(ik_wrist(a + h, b)) - np.array(ik_wrist(a - h, b))) / (2 * h),
            (np.array(ik_wrist(a, b + h)) - np.array(ik_wrist(a, b - h))) / (2 * h)])
        assert np.allclose(J, fd, atol=1e-7)

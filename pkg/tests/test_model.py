import math

import pytest

from hybridpkm import ConfigError, ControlGains, MachineParams, Pose, dump_params, load_params
from hybridpkm.model import CONFIG_KEYS


def test_defaults():
    p = MachineParams()
    assert p.leg_lengths == (0.75, 0.75, 0.75)
    assert p.tool_length == 0.09
    assert p.k_vt == 1.2 and p.k_vr == 3.27
    assert p.a_t_max == 13.0 and p.a_r_max == 270.0
    assert p.equiv_mass == 91.6278 and p.equiv_inertia == 0.2772
    assert (p.gains.kp_t, p.gains.kd_t, p.gains.ki_t) == (19200.0, 240.0, 512000.0)
    assert p.joint_velocity_limits == (3.27, 3.27, 1.2, 1.2, 1.2)
    assert p.joint_acceleration_limits == (270.0, 270.0, 13.0, 13.0, 13.0)


def test_short_tool_rejected():
    with pytest.raises(ConfigError, match="tool_length must exceed 0.072"):
        MachineParams(tool_length=0.05)
    with pytest.raises(ConfigError):
        MachineParams(tool_length=0.072)


@pytest.mark.parametrize("field,value", [
    ("k_vt", 0.0), ("a_t_max", -1.0), ("equiv_mass", 0.0), ("error_shutdown", float("nan")),
    ("leg_lengths", (0.75, 0.0, 0.75)), ("rho_limits", (0.5, 0.4)), ("tilt_limit", math.radians(50)),
])
def test_invalid_values(field, value):
    with pytest.raises(ConfigError):
        MachineParams(**{field: value})


def test_negative_gain_rejected():
    with pytest.raises(ConfigError):
        ControlGains(kp_t=-1.0)


def test_tilt_limit_45_deg_from_config_allowed():
    assert load_params("tilt_limit_deg = 45").tilt_limit == pytest.approx(math.pi / 4)


def test_pose_from_mm_deg():
    p = Pose.from_mm_deg(20, 0, 140, 130, 60)
    assert p == pytest.approx((math.radians(20), 0.0, 0.14, 0.13, 0.06))
    assert p.position == pytest.approx((0.14, 0.13, 0.06))


def test_load_params_empty_is_default():
    assert load_params("") == MachineParams()


def test_load_params_values_and_comments():
    p = load_params("# machine\nl1 = 0.8  # longer leg\n\nkp = 100\nmass = 50\n")
    assert p.leg_lengths == (0.8, 0.75, 0.75)
    assert p.gains.kp_r == p.gains.kp_t == 100.0
    assert p.equiv_mass == 50.0


@pytest.mark.parametrize("text,match", [
    ("foo = 1", "unknown key"),
    ("k_vt = 1\nk_vt = 2", "duplicate"),
    ("k_vt 1", "expected"),
    ("k_vt = fast", "not a number"),
    ("tool_length = 0.05", "tool_length must exceed"),
])
def test_load_params_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        load_params(text)


def test_dump_load_round_trip():
    p = load_params("l2 = 0.8\ntool_length = 0.1\nki = 1000\nrho_max = 1.2")
    assert load_params(dump_params(p)) == p
    assert set(line.split("=")[0].strip() for line in dump_params(p).splitlines()) == set(CONFIG_KEYS)

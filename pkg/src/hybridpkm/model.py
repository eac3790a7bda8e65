"""Machine constants, pose/joint containers and the ``key = value`` config loader."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

from .errors import ConfigError

MIN_TOOL_LENGTH = 0.072
MAX_TILT = math.pi / 4


class Pose(NamedTuple):
    """Tool orientation (alpha, beta) in rad and tool-tip position in m.

    The field order matches the twist ``(alpha_dot, beta_dot, x_dot, y_dot, z_dot)``.
    """

    alpha: float
    beta: float
    x: float
    y: float
    z: float

    @property
    def position(self):
        return (self.x, self.y, self.z)

    @classmethod
    def from_mm_deg(cls, alpha_deg, beta_deg, x_mm, y_mm, z_mm):
        return cls(math.radians(alpha_deg), math.radians(beta_deg),
                   x_mm * 1e-3, y_mm * 1e-3, z_mm * 1e-3)


class JointState(NamedTuple):
    """Actuated joints: wrist angles (rad) then prismatic lengths (m)."""

    theta1: float
    theta2: float
    rho1: float
    rho2: float
    rho3: float

    @property
    def rho(self):
        return (self.rho1, self.rho2, self.rho3)

    @property
    def theta(self):
        return (self.theta1, self.theta2)


class Twist(NamedTuple):
    alpha_dot: float
    beta_dot: float
    x_dot: float
    y_dot: float
    z_dot: float


@dataclass(frozen=True)
class ControlGains:
    """PID gains of the computed-torque law, one set per joint group.

    ``omega`` is informational only; the explicit gains are authoritative.
    """

    kp_r: float = 19200.0
    kd_r: float = 240.0
    ki_r: float = 512000.0
    kp_t: float = 19200.0
    kd_t: float = 240.0
    ki_t: float = 512000.0
    omega: float = 49.0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"{f.name} must be nonnegative", f.name)


@dataclass(frozen=True)
class MachineParams:
    leg_lengths: tuple = (0.75, 0.75, 0.75)
    tool_length: float = 0.09
    rho_limits: tuple = (0.05, 1.30)
    tilt_limit: float = MAX_TILT
    k_vt: float = 1.2
    k_vr: float = 3.27
    a_t_max: float = 13.0
    a_r_max: float = 270.0
    equiv_mass: float = 91.6278
    equiv_inertia: float = 0.2772
    gains: ControlGains = field(default_factory=ControlGains)
    safety_speed_ratio: float = 0.10
    error_shutdown: float = 0.003

    def __post_init__(self):
        object.__setattr__(self, "leg_lengths", tuple(float(v) for v in self.leg_lengths))
        object.__setattr__(self, "rho_limits", tuple(float(v) for v in self.rho_limits))
        if len(self.leg_lengths) != 3:
            raise ConfigError("leg_lengths needs three values", "leg_lengths")
        for i, li in enumerate(self.leg_lengths, start=1):
            _positive(f"l{i}", li)
        if not self.tool_length > MIN_TOOL_LENGTH:
            raise ConfigError(f"tool_length must exceed {MIN_TOOL_LENGTH}", "tool_length")
        rho_min, rho_max = self.rho_limits
        _positive("rho_min", rho_min)
        _positive("rho_max", rho_max)
        if not rho_min < rho_max:
            raise ConfigError("rho_min must be below rho_max", "rho_min")
        _positive("tilt_limit", self.tilt_limit)
        # tolerance covers radians(45) round-off
        if self.tilt_limit > MAX_TILT + 1e-12:
            raise ConfigError("tilt_limit must not exceed 45 degrees", "tilt_limit")
        for name in ("k_vt", "k_vr", "a_t_max", "a_r_max", "equiv_mass",
                     "equiv_inertia", "safety_speed_ratio", "error_shutdown"):
            _positive(name, getattr(self, name))

    @property
    def joint_velocity_limits(self):
        """Per-joint speed caps in JointState order (rad/s, m/s)."""
        return (self.k_vr, self.k_vr, self.k_vt, self.k_vt, self.k_vt)

    @property
    def joint_acceleration_limits(self):
        return (self.a_r_max, self.a_r_max, self.a_t_max, self.a_t_max, self.a_t_max)

    def with_changes(self, **changes):
        return replace(self, **changes)


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ConfigError(f"{name} must be positive", name)


CONFIG_KEYS = (
    "l1", "l2", "l3", "tool_length", "rho_min", "rho_max", "tilt_limit_deg",
    "k_vt", "k_vr", "a_t_max", "a_r_max", "mass", "inertia", "kp", "kd", "ki",
    "safety_speed_ratio", "error_shutdown",
)


def load_params(config_text: str = "") -> MachineParams:
    """Build validated :class:`MachineParams` from ``key = value`` text.

    Blank lines and ``#`` comments are ignored, values are SI except
    ``tilt_limit_deg``. Missing keys take their defaults; unknown or
    repeated keys raise :class:`ConfigError`.
    """
    values = {}
    for lineno, raw in enumerate(config_text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", key)
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", key)
        try:
            values[key] = float(value.strip())
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} is not a number: {value.strip()!r}", key) from None

    base = MachineParams()
    gains = base.gains
    gain_changes = {}
    for key, names in (("kp", ("kp_r", "kp_t")), ("kd", ("kd_r", "kd_t")), ("ki", ("ki_r", "ki_t"))):
        if key in values:
            gain_changes.update({n: values[key] for n in names})
    if gain_changes:
        gains = replace(gains, **gain_changes)

    legs = tuple(values.get(k, d) for k, d in zip(("l1", "l2", "l3"), base.leg_lengths))
    rho_limits = (values.get("rho_min", base.rho_limits[0]), values.get("rho_max", base.rho_limits[1]))
    tilt = math.radians(values["tilt_limit_deg"]) if "tilt_limit_deg" in values else base.tilt_limit
    return MachineParams(
        leg_lengths=legs,
        tool_length=values.get("tool_length", base.tool_length),
        rho_limits=rho_limits,
        tilt_limit=tilt,
        k_vt=values.get("k_vt", base.k_vt),
        k_vr=values.get("k_vr", base.k_vr),
        a_t_max=values.get("a_t_max", base.a_t_max),
        a_r_max=values.get("a_r_max", base.a_r_max),
        equiv_mass=values.get("mass", base.equiv_mass),
        equiv_inertia=values.get("inertia", base.equiv_inertia),
        gains=gains,
        safety_speed_ratio=values.get("safety_speed_ratio", base.safety_speed_ratio),
        error_shutdown=values.get("error_shutdown", base.error_shutdown),
    )


def dump_params(params: MachineParams) -> str:
    """Inverse of :func:`load_params` (gains written from the translational group)."""
    g = params.gains
    items = [
        ("l1", params.leg_lengths[0]), ("l2", params.leg_lengths[1]), ("l3", params.leg_lengths[2]),
        ("tool_length", params.tool_length),
        ("rho_min", params.rho_limits[0]), ("rho_max", params.rho_limits[1]),
        ("tilt_limit_deg", math.degrees(params.tilt_limit)),
        ("k_vt", params.k_vt), ("k_vr", params.k_vr),
        ("a_t_max", params.a_t_max), ("a_r_max", params.a_r_max),
        ("mass", params.equiv_mass), ("inertia", params.equiv_inertia),
        ("kp", g.kp_t), ("kd", g.kd_t), ("ki", g.ki_t),
        ("safety_speed_ratio", params.safety_speed_ratio),
        ("error_shutdown", params.error_shutdown),
    ]
    return "".join(f"{k} = {v!r}\n" for k, v in items)

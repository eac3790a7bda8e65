"""Quintic trajectory generation in task space and projection to joint space.

A *motion* is anything with a ``duration`` and a vectorised
``evaluate(t) -> (P, V, A)`` returning (N, 5) arrays in pose order
``(alpha, beta, x, y, z)``. Motions are sampled on the control-rate grid,
projected through the inverse kinematics and, when needed, slowed down by
uniform time scaling until every velocity and acceleration limit holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NoRealSolution, TiltLimit, WorkspaceExit
from .hybrid import evaluate_cycle
from .model import MachineParams, Pose, Twist
from .translation import DEFAULT_WORKING_MODE

DEFAULT_RATE = 1500.0
RATIO_TOL = 1e-9
MAX_RESCALE_ITERATIONS = 3


def quintic(t, t_f):
    """Normalised position, velocity and acceleration of the 10-15-6 quintic."""
    if not t_f > 0:
        raise ValueError("t_f must be positive")
    if t < 0 or t > t_f:
        raise ValueError(f"t = {t} outside [0, {t_f}]")
    r, r1, r2 = _quintic_normalised(t / t_f)
    return r, r1 / t_f, r2 / t_f ** 2


def _quintic_normalised(s):
    """r(s), dr/ds, d2r/ds2 for s in [0, 1] (arrays)."""
    s2 = s * s
    r = s2 * s * (10.0 - 15.0 * s + 6.0 * s2)
    r1 = 30.0 * s2 * (1.0 - s) ** 2
    r2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    return r, r1, r2


# --------------------------------------------------------------------------
# limits


class Limits(NamedTuple):
    joint_velocity: tuple
    joint_acceleration: tuple
    linear_speed: float
    angular_speed: float
    linear_acceleration: float
    angular_acceleration: float


def limits_for(params: MachineParams, speed_ratio=1.0, safety=False) -> Limits:
    """Limits used for rescaling.

    Only the Cartesian speed caps follow ``speed_ratio`` (and the safety
    ratio when ``safety`` is set); joint and acceleration caps are physical.
    """
    if not 0 < speed_ratio <= 1:
        raise ValueError("speed_ratio must be in (0, 1]")
    ratio = speed_ratio * (params.safety_speed_ratio if safety else 1.0)
    return Limits(params.joint_velocity_limits, params.joint_acceleration_limits,
                  params.k_vt * ratio, params.k_vr * ratio, params.a_t_max, params.a_r_max)


def travel_time(P1, P2, params: MachineParams, speed_ratio=1.0):
    """Minimum traveling time from translational and angular distances."""
    if not 0 < speed_ratio <= 1:
        raise ValueError("speed_ratio must be in (0, 1]")
    d = np.asarray(P2, dtype=float) - np.asarray(P1, dtype=float)
    d_t = math.sqrt(d[2] ** 2 + d[3] ** 2 + d[4] ** 2)
    d_r = math.hypot(d[0], d[1])
    return max(d_t / (speed_ratio * params.k_vt), d_r / (speed_ratio * params.k_vr))


# --------------------------------------------------------------------------
# motions


class Motion:
    duration: float

    def evaluate(self, t):
        raise NotImplementedError

    def scaled(self, factor):
        return TimeScaled(self, factor)


class TimeScaled(Motion):
    """``self(t) = base(t / factor)``: velocities / factor, accelerations / factor**2."""

    def __init__(self, base: Motion, factor: float):
        if isinstance(base, TimeScaled):
            base, factor = base.base, base.factor * factor
        self.base = base
        self.factor = factor
        self.duration = base.duration * factor

    def evaluate(self, t):
        P, V, A = self.base.evaluate(np.asarray(t, dtype=float) / self.factor)
        return P, V / self.factor, A / self.factor ** 2


class LinePath:
    """Straight interpolation ``P1 + (P2 - P1) r`` of all five pose coordinates."""

    def __init__(self, P1, P2):
        self.start = np.asarray(P1, dtype=float)
        self.end = np.asarray(P2, dtype=float)
        self.delta = self.end - self.start

    def geometry(self, r):
        r = np.asarray(r, dtype=float)[:, None]
        P = self.start + self.delta * r
        # exact endpoints
        P[r[:, 0] == 1.0] = self.end
        d1 = np.broadcast_to(self.delta, P.shape)
        return P, d1, np.zeros_like(P)


def rotation_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_y(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class CircleSpec:
    """Arc of radius ``radius`` about the tool-tip point ``center`` (m).

    The arc lies in the local xy plane, rotated by ``plane_alpha`` about z then
    ``plane_beta`` about y; the tool orientation moves linearly from
    ``(a_start, b_start)`` to ``(a_end, b_end)``.
    """

    center: tuple
    radius: float
    eta_min: float = 0.0
    eta_max: float = 2 * math.pi
    plane_alpha: float = 0.0
    plane_beta: float = 0.0
    a_start: float = 0.0
    b_start: float = 0.0
    a_end: float = 0.0
    b_end: float = 0.0
    speed_ratio: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("circle radius must be positive")
        if self.eta_max == self.eta_min:
            raise ValueError("eta_max must differ from eta_min")
        if not 0 < self.speed_ratio <= 1:
            raise ValueError("speed_ratio must be in (0, 1]")

    @property
    def rotation(self):
        return rotation_z(self.plane_alpha) @ rotation_y(self.plane_beta)

    def point(self, eta):
        local = np.array([self.radius * math.cos(eta), self.radius * math.sin(eta), 0.0])
        return np.asarray(self.center, dtype=float) + self.rotation @ local

    @property
    def start_pose(self) -> Pose:
        return Pose(self.a_start, self.b_start, *self.point(self.eta_min))

    @property
    def end_pose(self) -> Pose:
        return Pose(self.a_end, self.b_end, *self.point(self.eta_max))

    @property
    def arc_length(self):
        return abs(self.eta_max - self.eta_min) * self.radius


class ArcPath:
    def __init__(self, circle: CircleSpec):
        self.circle = circle
        self.rot = circle.rotation
        self.center = np.asarray(circle.center, dtype=float)
        self.d_eta = circle.eta_max - circle.eta_min
        self.d_orient = np.array([circle.a_end - circle.a_start, circle.b_end - circle.b_start])

    def geometry(self, r):
        sp = self.circle
        r = np.asarray(r, dtype=float)
        g = sp.eta_min + self.d_eta * r
        R, de = sp.radius, self.d_eta
        cg, sg = np.cos(g), np.sin(g)
        zero = np.zeros_like(r)
        local = np.stack([R * cg, R * sg, zero], axis=1)
        local1 = np.stack([-R * sg * de, R * cg * de, zero], axis=1)
        local2 = np.stack([-R * cg * de * de, -R * sg * de * de, zero], axis=1)
        n = len(r)
        P = np.empty((n, 5)); D1 = np.empty((n, 5)); D2 = np.zeros((n, 5))
        P[:, 0] = sp.a_start + self.d_orient[0] * r
        P[:, 1] = sp.b_start + self.d_orient[1] * r
        P[:, 2:] = self.center + local @ self.rot.T
        D1[:, :2] = self.d_orient
        D1[:, 2:] = local1 @ self.rot.T
        D2[:, 2:] = local2 @ self.rot.T
        return P, D1, D2


class QuinticMotion(Motion):
    """A path ``geometry(r)`` traversed with the quintic time law over ``t_f``."""

    def __init__(self, path, t_f):
        self.path = path
        self.duration = float(t_f)

    def evaluate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.duration == 0.0:
            P, _, _ = self.path.geometry(np.zeros_like(t))
            return P, np.zeros_like(P), np.zeros_like(P)
        s = np.clip(t / self.duration, 0.0, 1.0)
        r, r1, r2 = _quintic_normalised(s)
        r[s == 1.0] = 1.0
        rd = r1 / self.duration
        rdd = r2 / self.duration ** 2
        P, D1, D2 = self.path.geometry(r)
        V = D1 * rd[:, None]
        A = D2 * (rd * rd)[:, None] + D1 * rdd[:, None]
        return P, V, A

    def scaled(self, factor):
        return QuinticMotion(self.path, self.duration * factor)


def linear_motion(P1, P2, params, speed_ratio=1.0, safety=False):
    ratio = speed_ratio * (params.safety_speed_ratio if safety else 1.0)
    return QuinticMotion(LinePath(P1, P2), travel_time(P1, P2, params, ratio))


def circle_travel_time(circle: CircleSpec, params: MachineParams, speed_ratio=1.0):
    """Traveling-time rule applied to the arc length and the orientation change."""
    d_r = math.hypot(circle.a_end - circle.a_start, circle.b_end - circle.b_start)
    return max(circle.arc_length / (speed_ratio * params.k_vt), d_r / (speed_ratio * params.k_vr))


# --------------------------------------------------------------------------
# sampled trajectories


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    pose: Pose
    V: Twist
    A: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    q_ddot: np.ndarray


@dataclass
class SegmentInfo:
    name: str
    t_start: float
    t_f_initial: float
    multiplier: float
    t_f: float
    peak_ratios: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    """Column-oriented trajectory: every array has one row per sample."""

    t: np.ndarray
    pose: np.ndarray
    V: np.ndarray
    A: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    q_ddot: np.ndarray
    segments: list = field(default_factory=list)

    def __len__(self):
        return len(self.t)

    def __getitem__(self, k) -> TrajectorySample:
        return TrajectorySample(float(self.t[k]), Pose(*self.pose[k]), Twist(*self.V[k]),
                                self.A[k], self.q[k], self.q_dot[k], self.q_ddot[k])

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def duration(self):
        return float(self.t[-1] - self.t[0]) if len(self.t) else 0.0

    @classmethod
    def empty(cls):
        z = np.zeros((0, 5))
        return cls(np.zeros(0), z, z.copy(), z.copy(), z.copy(), z.copy(), z.copy())

    def shifted(self, dt):
        return Trajectory(self.t + dt, self.pose, self.V, self.A, self.q, self.q_dot, self.q_ddot,
                          [SegmentInfo(s.name, s.t_start + dt, s.t_f_initial, s.multiplier, s.t_f,
                                       dict(s.peak_ratios)) for s in self.segments])


def concatenate(parts) -> Trajectory:
    """Chain trajectories end to start, dropping the duplicated junction sample."""
    parts = [p for p in parts if len(p)]
    if not parts:
        return Trajectory.empty()
    out = [parts[0]]
    t_end = parts[0].t[-1]
    for p in parts[1:]:
        p = p.shifted(t_end - p.t[0])
        out.append(Trajectory(p.t[1:], p.pose[1:], p.V[1:], p.A[1:], p.q[1:],
                              p.q_dot[1:], p.q_ddot[1:], p.segments))
        t_end = p.t[-1]
    return Trajectory(*(np.concatenate([getattr(o, name) for o in out])
                        for name in ("t", "pose", "V", "A", "q", "q_dot", "q_ddot")),
                      segments=[s for o in out for s in o.segments])


def time_grid(duration, rate=DEFAULT_RATE):
    """Uniform grid ``k / rate`` on ``[0, duration]``; the end point is always included."""
    if duration <= 0.0:
        return np.zeros(1)
    n = int(math.floor(duration * rate + 1e-9))
    t = np.arange(n + 1) / rate
    if duration - t[-1] > 1e-12 * max(1.0, duration):
        t = np.append(t, duration)
    else:
        t[-1] = duration
    return t


def project(motion: Motion, times, params: MachineParams, mode=DEFAULT_WORKING_MODE,
            check_workspace=True) -> Trajectory:
    """Evaluate ``motion`` at ``times`` and map every sample to joint space."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    P, V, A = motion.evaluate(times)
    n = len(times)
    q = np.empty((n, 5)); qd = np.empty((n, 5)); qdd = np.empty((n, 5))
    lo, hi = params.rho_limits
    for k in range(n):
        try:
            qk, J, Jd = evaluate_cycle(P[k], V[k], params, mode)
        except TiltLimit as exc:
            raise WorkspaceExit(f"t = {times[k]:.6f} s: {exc}", float(times[k]), "tilt") from exc
        except NoRealSolution as exc:
            raise WorkspaceExit(f"t = {times[k]:.6f} s: {exc}", float(times[k]), "no-real-IK") from exc
        if check_workspace and not (lo <= qk[2] <= hi and lo <= qk[3] <= hi and lo <= qk[4] <= hi):
            raise WorkspaceExit(f"t = {times[k]:.6f} s: joint limit, rho = {qk[2:]}",
                                float(times[k]), "joint-limit")
        q[k] = qk
        qd[k] = J @ V[k]
        qdd[k] = J @ A[k] + Jd @ V[k]
    return Trajectory(times, P, V, A, q, qd, qdd)


def limit_ratios(traj: Trajectory, limits: Limits):
    """Per-sample demand/limit ratios as a dict of 1-D arrays.

    Velocity channels scale with 1/time-factor, acceleration channels with
    its square.
    """
    out = {}
    names = ("theta1", "theta2", "rho1", "rho2", "rho3")
    for i, name in enumerate(names):
        out[f"v_{name}"] = np.abs(traj.q_dot[:, i]) / limits.joint_velocity[i]
        out[f"a_{name}"] = np.abs(traj.q_ddot[:, i]) / limits.joint_acceleration[i]
    out["v_linear"] = np.linalg.norm(traj.V[:, 2:], axis=1) / limits.linear_speed
    out["v_angular"] = np.linalg.norm(traj.V[:, :2], axis=1) / limits.angular_speed
    out["a_linear"] = np.linalg.norm(traj.A[:, 2:], axis=1) / limits.linear_acceleration
    out["a_angular"] = np.linalg.norm(traj.A[:, :2], axis=1) / limits.angular_acceleration
    return out


def peak_ratios(traj: Trajectory, limits: Limits):
    if not len(traj):
        return {}
    return {k: float(v.max()) for k, v in limit_ratios(traj, limits).items()}


def rescale_to_limits(traj: Trajectory, params: MachineParams, limits: Limits | None = None,
                      refine=None) -> float:
    """Time multiplier ``max(gamma_V, sqrt(gamma_A))``, or 1 if already feasible.

    ``gamma_V``/``gamma_A`` are the worst velocity/acceleration ratios over
    all samples, joints and Cartesian channels. With ``refine`` (a callable
    mapping an array of times to a :class:`Trajectory`) each channel's peak
    is located between samples, so the returned multiplier bounds the
    continuous profile rather than just the sampled one.
    """
    if limits is None:
        limits = limits_for(params)
    if len(traj) == 0:
        return 1.0
    ratios = limit_ratios(traj, limits)
    peaks = {k: float(v.max()) for k, v in ratios.items()}
    if refine is not None and len(traj) > 2:
        t = traj.t
        for name, values in ratios.items():
            k = int(np.argmax(values))
            if values[k] == 0.0:
                continue
            lo, hi = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]

            def neg(tau, name=name):
                return -limit_ratios(refine(np.array([tau])), limits)[name][0]

            res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, hi)})
            peaks[name] = max(peaks[name], -float(res.fun))
    gamma_v = max(v for k, v in peaks.items() if k.startswith("v_"))
    gamma_a = max(v for k, v in peaks.items() if k.startswith("a_"))
    return max(1.0, gamma_v, math.sqrt(gamma_a))


def sample_motion(motion: Motion, params: MachineParams, limits: Limits, sample_rate=DEFAULT_RATE,
                  mode=DEFAULT_WORKING_MODE, rescale=True, name="segment", align=True):
    """Sample and project a motion, stretching it in time until all limits hold.

    With ``align`` the final duration is rounded up to a whole number of
    sample periods, which keeps every sample of a chained plan on the
    control-rate grid. Stretching never raises a limit ratio.
    """
    t_f_initial = motion.duration
    total = 1.0
    current = motion
    traj = project(current, time_grid(current.duration, sample_rate), params, mode)
    if rescale:
        for _ in range(MAX_RESCALE_ITERATIONS):
            def refine(times, m=current):
                return project(m, times, params, mode, check_workspace=False)
            m = rescale_to_limits(traj, params, limits, refine=refine)
            if m <= 1.0:
                break
            total *= m
            current = motion.scaled(total)
            traj = project(current, time_grid(current.duration, sample_rate), params, mode)
    if align and current.duration > 0.0:
        # whole number of control periods so chained segments share one grid
        n = math.ceil(current.duration * sample_rate - 1e-9)
        stretch = n / sample_rate / current.duration
        if stretch != 1.0:
            total *= stretch
            current = motion.scaled(total)
            traj = project(current, time_grid(current.duration, sample_rate), params, mode)
    traj.segments = [SegmentInfo(name, 0.0, t_f_initial, total, current.duration,
                                 peak_ratios(traj, limits))]
    return traj


def plan_linear(P1, P2, params: MachineParams, speed_ratio=1.0, sample_rate=DEFAULT_RATE, *,
                safety=False, mode=DEFAULT_WORKING_MODE, rescale=True, name="line") -> Trajectory:
    """Quintic straight-line move between two poses, projected to joint space."""
    limits = limits_for(params, speed_ratio, safety)
    motion = linear_motion(P1, P2, params, speed_ratio, safety)
    return sample_motion(motion, params, limits, sample_rate, mode, rescale, name)


def plan_tour(poses, params: MachineParams, speed_ratio=1.0, sample_rate=DEFAULT_RATE, *,
              safety=False, mode=DEFAULT_WORKING_MODE, rescale=True) -> Trajectory:
    """Consecutive linear moves through ``poses``, each timed and rescaled on its own."""
    parts = [plan_linear(a, b, params, speed_ratio, sample_rate, safety=safety, mode=mode,
                         rescale=rescale, name=f"P{i + 1}->P{i + 2}")
             for i, (a, b) in enumerate(zip(poses[:-1], poses[1:]))]
    return concatenate(parts)


def plan_arc(circle: CircleSpec, params: MachineParams, sample_rate=DEFAULT_RATE, *, safety=False,
             mode=DEFAULT_WORKING_MODE, rescale=True) -> Trajectory:
    limits = limits_for(params, circle.speed_ratio, safety)
    ratio = circle.speed_ratio * (params.safety_speed_ratio if safety else 1.0)
    motion = QuinticMotion(ArcPath(circle), circle_travel_time(circle, params, ratio))
    return sample_motion(motion, params, limits, sample_rate, mode, rescale, "arc")


def plan_circular(circle: CircleSpec, entry, exit, params: MachineParams, sample_rate=DEFAULT_RATE, *,
                  safety=False, mode=DEFAULT_WORKING_MODE, rescale=True) -> Trajectory:
    """Approach line, arc, retract line.

    Positions follow the rotated circle; orientation interpolates linearly in
    (alpha, beta). The approach and retract moves use the circle's speed ratio.
    """
    kw = dict(safety=safety, mode=mode, rescale=rescale)
    parts = [
        plan_linear(entry, circle.start_pose, params, circle.speed_ratio, sample_rate, name="approach", **kw),
        plan_arc(circle, params, sample_rate, **kw),
        plan_linear(circle.end_pose, exit, params, circle.speed_ratio, sample_rate, name="retract", **kw),
    ]
    return concatenate(parts)


def close_loop(current, plan: Trajectory, params: MachineParams, speed_ratio=1.0,
               sample_rate=DEFAULT_RATE, *, safety=False, mode=DEFAULT_WORKING_MODE,
               tol=1e-12) -> Trajectory:
    """Add linear moves from ``current`` to the plan start and from its end back."""
    if not len(plan):
        return plan
    current = np.asarray(current, dtype=float)
    parts = []
    kw = dict(safety=safety, mode=mode)
    if np.max(np.abs(plan.pose[0] - current)) > tol:
        parts.append(plan_linear(current, plan.pose[0], params, speed_ratio, sample_rate,
                                 name="approach", **kw))
    parts.append(plan)
    if np.max(np.abs(plan.pose[-1] - current)) > tol:
        parts.append(plan_linear(plan.pose[-1], current, params, speed_ratio, sample_rate,
                                 name="retract", **kw))
    return concatenate(parts) if len(parts) > 1 else plan

"""Discrete-time simulation of the decoupled computed-torque loop.

Each actuator is an equivalent inertia (wrist) or mass (prismatic axis)
driven by ``Gamma = m (q_dd_d + Kp e + Kd e_dot + Ki int e)``. Positions are
sensed at ``sensing_rate``, velocities come from a filtered backward
difference, and the torque is recomputed at ``control_rate`` and held
between control ticks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import Shutdown
from .model import MachineParams

ROTATIONAL = "rotational"
TRANSLATIONAL = "translational"
AXIS_KINDS = (ROTATIONAL, ROTATIONAL, TRANSLATIONAL, TRANSLATIONAL, TRANSLATIONAL)
AXIS_NAMES = ("theta1", "theta2", "rho1", "rho2", "rho3")


def torque_normalization(params: MachineParams):
    """Maximum torque (N m) / force (N) per axis, from the acceleration caps."""
    g_r = params.equiv_inertia * params.a_r_max
    g_t = params.equiv_mass * params.a_t_max
    return np.array([g_r, g_r, g_t, g_t, g_t])


def axis_inertias(params: MachineParams):
    j, m = params.equiv_inertia, params.equiv_mass
    return np.array([j, j, m, m, m])


def axis_gains(params: MachineParams):
    """``(kp, kd, ki)`` arrays, one entry per axis."""
    g = params.gains
    kp = np.array([g.kp_r, g.kp_r, g.kp_t, g.kp_t, g.kp_t])
    kd = np.array([g.kd_r, g.kd_r, g.kd_t, g.kd_t, g.kd_t])
    ki = np.array([g.ki_r, g.ki_r, g.ki_t, g.ki_t, g.ki_t])
    return kp, kd, ki


@dataclass
class AxisPlant:
    kind: str
    inertia: float
    torque_limit: float
    position: float = 0.0
    velocity: float = 0.0

    def __post_init__(self):
        if self.kind not in (ROTATIONAL, TRANSLATIONAL):
            raise ValueError(f"unknown axis kind {self.kind!r}")
        if not self.inertia > 0:
            raise ValueError("inertia/mass must be positive")
        if not self.torque_limit > 0:
            raise ValueError("torque limit must be positive")

    def step(self, torque, h):
        """Advance by ``h`` under constant ``torque``; returns the acceleration."""
        acc = torque / self.inertia
        self.position += h * (self.velocity + 0.5 * h * acc)
        self.velocity += h * acc
        return acc


@dataclass
class IntegralState:
    value: float = 0.0
    prev_error: float | None = None

    def update(self, error, dt):
        if self.prev_error is not None:
            self.value += 0.5 * dt * (self.prev_error + error)
        self.prev_error = error
        return self.value


def computed_torque(inertia, q_d, qd_d, qdd_d, q, qd_est, integral, kp, kd, ki, torque_limit):
    """Computed-torque PID law.

    ``integral`` is the running integral of the position error. Returns the
    saturated and the raw torque.
    """
    raw = inertia * (qdd_d + kp * (q_d - q) + kd * (qd_d - qd_est) + ki * integral)
    return np.clip(raw, -torque_limit, torque_limit), raw


class LowPass:
    """First-order low-pass, bilinear discretisation (exact -3 dB at the cutoff)."""

    def __init__(self, cutoff, rate, shape=()):
        if not 0 < cutoff < rate / 2:
            raise ValueError("cutoff must lie in (0, rate/2)")
        b, a = signal.butter(1, cutoff, btype="low", fs=rate)
        self.b0, self.b1 = float(b[0]), float(b[1])
        self.a1 = float(a[1])
        self.x_prev = np.zeros(shape)
        self.y_prev = np.zeros(shape)

    def reset(self, value):
        self.x_prev = np.array(value, dtype=float)
        self.y_prev = np.array(value, dtype=float)

    def __call__(self, x):
        y = self.b0 * x + self.b1 * self.x_prev - self.a1 * self.y_prev
        self.x_prev = x
        self.y_prev = y
        return y


class VelocityEstimator:
    """Backward difference at the sensing rate followed by :class:`LowPass`."""

    def __init__(self, cutoff, sensing_rate, initial_position, initial_velocity=None):
        self.h = 1.0 / sensing_rate
        self.prev = np.array(initial_position, dtype=float)
        self.filter = LowPass(cutoff, sensing_rate, self.prev.shape)
        v0 = np.zeros_like(self.prev) if initial_velocity is None else initial_velocity
        self.filter.reset(v0)
        self.value = np.array(v0, dtype=float)

    def update(self, position):
        position = np.asarray(position, dtype=float)
        raw = (position - self.prev) / self.h
        self.prev = position.copy()
        self.value = self.filter(raw)
        return self.value


def estimate_velocity(positions, sensing_rate=9000.0, cutoff=200.0, control_rate=1500.0):
    """Filtered velocity of a position record sampled at ``sensing_rate``.

    Returns one value per control period (every ``sensing_rate / control_rate``
    samples, starting with the first full period).
    """
    positions = np.asarray(positions, dtype=float)
    if len(positions) < 2:
        raise ValueError("need at least two position samples")
    ratio = _rate_ratio(sensing_rate, control_rate)
    est = VelocityEstimator(cutoff, sensing_rate, positions[0])
    out = np.array([est.update(p) for p in positions[1:]])
    return out[ratio - 1::ratio]


def _rate_ratio(sensing_rate, control_rate):
    ratio = sensing_rate / control_rate
    if ratio < 1 or abs(ratio - round(ratio)) > 1e-9:
        raise ValueError("sensing_rate must be an integer multiple of control_rate")
    return int(round(ratio))


@dataclass(frozen=True)
class Disturbance:
    """Constant force/torque on one axis (0-based index) from ``t_start`` to ``t_end``."""

    axis: int
    value: float
    t_start: float = 0.0
    t_end: float = math.inf

    def at(self, t):
        return self.value if self.t_start <= t < self.t_end else 0.0


@dataclass(frozen=True)
class SimConfig:
    control_rate: float = 1500.0
    sensing_rate: float = 9000.0
    velocity_filter_cutoff: float = 200.0
    duration: float | None = None
    disturbances: tuple = ()
    initial_offset: tuple = (0.0, 0.0, 0.0, 0.0, 0.0)
    measure_time: bool = False
    # "period-mean": (q_dot[k+1] - q_dot[k]) / dt, the acceleration the plant must
    # hold over the coming period; "sample": q_ddot[k] as planned
    feedforward: str = "period-mean"
    # "error": filtered derivative of the sensed tracking error; "measured":
    # q_dot_desired minus the filtered velocity estimate
    derivative: str = "error"
    # "exact": constant-acceleration update over each sub-step; "semi-implicit":
    # velocity first, then position with the new velocity
    integrator: str = "exact"

    def __post_init__(self):
        if not self.sensing_rate >= self.control_rate > 0:
            raise ValueError("sensing_rate must be >= control_rate > 0")
        _rate_ratio(self.sensing_rate, self.control_rate)
        if not 0 < self.velocity_filter_cutoff < self.sensing_rate / 2:
            raise ValueError("velocity_filter_cutoff must lie in (0, sensing_rate/2)")
        if len(self.initial_offset) != 5:
            raise ValueError("initial_offset needs five values")
        if self.feedforward not in ("period-mean", "sample"):
            raise ValueError(f"unknown feedforward {self.feedforward!r}")
        if self.derivative not in ("error", "measured"):
            raise ValueError(f"unknown derivative {self.derivative!r}")
        if self.integrator not in ("exact", "semi-implicit"):
            raise ValueError(f"unknown integrator {self.integrator!r}")


@dataclass
class SimTrace:
    t: np.ndarray
    q_desired: np.ndarray
    q_actual: np.ndarray
    qd_desired: np.ndarray
    qd_estimated: np.ndarray
    error: np.ndarray
    u: np.ndarray
    cycle_time: np.ndarray
    shutdown: bool = False
    shutdown_time: float | None = None
    shutdown_axis: int | None = None
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def max_abs_error(self):
        return np.abs(self.error).max(axis=0) if len(self.t) else np.zeros(5)


def _hermite(q0, v0, q1, v1, dt, s):
    """Cubic Hermite interpolation between two plan samples at fraction ``s``."""
    s2 = s * s
    s3 = s2 * s
    return ((2 * s3 - 3 * s2 + 1) * q0 + (s3 - 2 * s2 + s) * dt * v0
            + (3 * s2 - 2 * s3) * q1 + (s3 - s2) * dt * v1)


def run_sim(plan, params: MachineParams, sim: SimConfig | None = None, raise_on_shutdown=False) -> SimTrace:
    """Track ``plan`` (anything with ``t``, ``q``, ``q_dot``, ``q_ddot`` arrays).

    Per control cycle: hold the latest plan sample, check the shutdown rule on
    the prismatic errors, compute and saturate the torques, then integrate
    every plant over ``sensing_rate / control_rate`` sub-steps with the torque
    held and the disturbances applied.
    """
    sim = sim or SimConfig()
    if len(plan.t) == 0:
        raise ValueError("plan is empty")
    dt = 1.0 / sim.control_rate
    n_sub = _rate_ratio(sim.sensing_rate, sim.control_rate)
    h = dt / n_sub

    inertia = axis_inertias(params)
    gmax = torque_normalization(params)
    kp, kd, ki = axis_gains(params)
    plan_t = np.asarray(plan.t, dtype=float)
    plan_q = np.asarray(plan.q, dtype=float)
    plan_qd = np.asarray(plan.q_dot, dtype=float)
    plan_qdd = np.asarray(plan.q_ddot, dtype=float)
    n_plan = len(plan_t)
    t0 = float(plan_t[0])
    duration = sim.duration if sim.duration is not None else float(plan_t[-1]) - t0
    n_cycles = int(math.floor(duration * sim.control_rate + 1e-9)) + 1

    pos = plan_q[0] + np.asarray(sim.initial_offset, dtype=float)
    vel = plan_qd[0].copy()
    vel_est = VelocityEstimator(sim.velocity_filter_cutoff, sim.sensing_rate, pos, vel)
    err_prev = plan_q[0] - pos
    err_rate = LowPass(sim.velocity_filter_cutoff, sim.sensing_rate, (5,))
    integral = np.zeros(5)
    dist = [(d, d.axis) for d in sim.disturbances]
    exact = sim.integrator == "exact"

    names = ("q_desired", "q_actual", "qd_desired", "qd_estimated", "error", "u")
    rec = {name: np.zeros((n_cycles, 5)) for name in names}
    times = np.zeros(n_cycles)
    cycle_time = np.zeros(n_cycles)
    shutdown, shutdown_time, shutdown_axis = False, None, None
    k = 0
    n_done = 0
    for c in range(n_cycles):
        t = t0 + c * dt
        tic = time.perf_counter() if sim.measure_time else 0.0
        # zero-order hold on the plan
        while k + 1 < n_plan and plan_t[k + 1] <= t + 1e-9:
            k += 1
        q_d, qd_d = plan_q[k], plan_qd[k]
        has_next = k + 1 < n_plan and plan_t[k + 1] - plan_t[k] > 0
        if sim.feedforward == "period-mean" and has_next:
            qdd_d = (plan_qd[k + 1] - qd_d) / (plan_t[k + 1] - plan_t[k])
        else:
            qdd_d = plan_qdd[k]
        err = q_d - pos
        if c:
            integral += 0.5 * dt * (rec["error"][c - 1] + err)
        if sim.derivative == "error":
            err_dot = err_rate.y_prev
        else:
            err_dot = qd_d - vel_est.value
        raw = inertia * (qdd_d + kp * err + kd * err_dot + ki * integral)
        torque = np.clip(raw, -gmax, gmax)
        u = torque / gmax
        if sim.measure_time:
            cycle_time[c] = time.perf_counter() - tic
        times[c] = t
        rec["q_desired"][c] = q_d
        rec["q_actual"][c] = pos
        rec["qd_desired"][c] = qd_d
        rec["qd_estimated"][c] = vel_est.value
        rec["error"][c] = err
        rec["u"][c] = u
        n_done = c + 1
        over = np.abs(err[2:]) > params.error_shutdown
        if over.any():
            shutdown = True
            shutdown_time = t
            shutdown_axis = 2 + int(np.argmax(over))
            rec["u"][c] = 0.0
            break

        for j in range(n_sub):
            ts = t + j * h
            force = torque.copy()
            for d, axis in dist:
                force[axis] += d.at(ts)
            acc = force / inertia
            if exact:
                pos = pos + h * (vel + 0.5 * h * acc)
                vel = vel + h * acc
            else:
                vel = vel + h * acc
                pos = pos + h * vel
            vel_est.update(pos)
            if sim.derivative == "error":
                if has_next:
                    ref = _hermite(q_d, qd_d, plan_q[k + 1], plan_qd[k + 1],
                                   plan_t[k + 1] - plan_t[k], (j + 1) / n_sub)
                else:
                    ref = q_d
                e = ref - pos
                err_rate((e - err_prev) / h)
                err_prev = e

    trace = SimTrace(times[:n_done], *(rec[name][:n_done] for name in names),
                     cycle_time[:n_done], shutdown, shutdown_time, shutdown_axis)
    if shutdown and raise_on_shutdown:
        raise Shutdown(f"position error above {params.error_shutdown} m on {AXIS_NAMES[shutdown_axis]} "
                       f"at t = {shutdown_time:.6f} s", trace)
    return trace

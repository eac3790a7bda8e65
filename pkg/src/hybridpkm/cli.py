"""Command-line front-end.

Exit codes: 0 success, 1 usage or configuration error, 2 kinematic or
planning failure, 3 safety shutdown during simulation.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .control import AXIS_NAMES, Disturbance, SimConfig, run_sim
from .errors import ConfigError, GCodeError, KinematicsError
from .fixtures import (TABLE1_MM_DEG, table1_pose, table2_circle, table2_entry, table2_exit)
from .gcode import DEFAULT_CORNER_CAP, blend_corners, parse_gcode, plan_gcode
from .hybrid import fk_full, ik_full
from .model import MachineParams, Pose, load_params
from .translation import ASSEMBLY_MODES, WorkingMode
from .trajectory import (CircleSpec, close_loop, concatenate, limits_for, plan_circular, plan_linear)
from .workspace import check_cube

EXIT_OK, EXIT_USAGE, EXIT_FAILURE, EXIT_SHUTDOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text, n=None, name="value"):
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(values) != n:
        raise UsageError(f"{name}: expected {n} values, got {len(values)}")
    return values


def _pose_arg(text, name, mm_deg=False):
    v = _floats(text, 5, name)
    return Pose.from_mm_deg(*v) if mm_deg else Pose(*v)


def _axis(text):
    if text in AXIS_NAMES:
        return AXIS_NAMES.index(text)
    try:
        k = int(text)
    except ValueError:
        raise UsageError(f"unknown axis {text!r}; use 1-5 or one of {', '.join(AXIS_NAMES)}") from None
    if not 1 <= k <= 5:
        raise UsageError("axis numbers run from 1 to 5")
    return k - 1


def _params(args) -> MachineParams:
    if not getattr(args, "config", None):
        return MachineParams()
    try:
        return load_params(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None


def _fmt(x):
    return f"{x:.10g}"


# --------------------------------------------------------------------------
# ik / fk


def cmd_ik(args, out=sys.stdout):
    params = _params(args)
    alpha = math.radians(args.alpha_deg) if args.alpha_deg is not None else args.alpha
    beta = math.radians(args.beta_deg) if args.beta_deg is not None else args.beta
    xyz = []
    for name in "xyz":
        mm = getattr(args, f"{name}_mm")
        xyz.append(mm * 1e-3 if mm is not None else getattr(args, name))
    pose = Pose(alpha, beta, *xyz)
    modes = WorkingMode.all() if args.all_modes else [WorkingMode.parse(args.mode)]
    for mode in modes:
        q = ik_full(pose, params, mode, check_limits=args.check_limits)
        label = "".join("+" if s > 0 else "-" for s in mode)
        print(f"mode {label}: theta1={_fmt(q.theta1)} theta2={_fmt(q.theta2)} "
              f"rho1={_fmt(q.rho1)} rho2={_fmt(q.rho2)} rho3={_fmt(q.rho3)}", file=out)
    return EXIT_OK


def cmd_fk(args, out=sys.stdout):
    params = _params(args)
    t1 = math.radians(args.theta1_deg) if args.theta1_deg is not None else args.theta1
    t2 = math.radians(args.theta2_deg) if args.theta2_deg is not None else args.theta2
    rho = _floats(args.rho, 3, "--rho")
    modes = ASSEMBLY_MODES if args.all_modes else [args.mode]
    for mode in modes:
        p = fk_full((t1, t2) + rho, params, mode)
        print(f"assembly {mode:+d}: alpha={_fmt(p.alpha)} beta={_fmt(p.beta)} "
              f"x={_fmt(p.x)} y={_fmt(p.y)} z={_fmt(p.z)}", file=out)
    return EXIT_OK


# --------------------------------------------------------------------------
# plan


def _summary(traj, params, limits, out):
    for seg in traj.segments:
        print(f"segment {seg.name}: t_f before rescale {seg.t_f_initial:.6f} s, "
              f"multiplier {seg.multiplier:.6f}, t_f after {seg.t_f:.6f} s", file=out)
    if not len(traj):
        print("empty plan", file=out)
        return
    speed = np.linalg.norm(traj.V[:, 2:], axis=1)
    accel = np.linalg.norm(traj.A[:, 2:], axis=1)
    print(f"duration {traj.duration:.6f} s, {len(traj)} samples", file=out)
    print(f"peak tool speed {speed.max():.6f} m/s, peak tool acceleration {accel.max():.6f} m/s^2",
          file=out)
    for i, name in enumerate(AXIS_NAMES):
        v = np.abs(traj.q_dot[:, i]).max()
        a = np.abs(traj.q_ddot[:, i]).max()
        print(f"  {name:7s} peak rate {v:.6f} ({v / limits.joint_velocity[i]:.4f} of limit), "
              f"peak accel {a:.6f} ({a / limits.joint_acceleration[i]:.4f} of limit)", file=out)


def _write_plan(traj, args, out):
    if args.out:
        csvio.write_trajectory(args.out, traj)
        print(f"wrote {len(traj)} rows to {args.out}", file=out)


def cmd_plan_line(args, out=sys.stdout):
    params = _params(args)
    if args.from_table1:
        names = [n.upper() for n in args.from_table1]
        unknown = [n for n in names if n not in TABLE1_MM_DEG]
        if unknown or len(names) < 2:
            raise UsageError(f"--from-table1 needs at least two of {', '.join(TABLE1_MM_DEG)}")
        poses = [table1_pose(n) for n in names]
    else:
        if not (args.start and args.end):
            raise UsageError("give --from-table1 or both --start and --end")
        poses = [_pose_arg(args.start, "--start", args.mm_deg), _pose_arg(args.end, "--end", args.mm_deg)]
    kw = dict(safety=args.safety, rescale=not args.no_rescale)
    parts = [plan_linear(a, b, params, args.speed_ratio, args.rate, name=f"{i}", **kw)
             for i, (a, b) in enumerate(zip(poses[:-1], poses[1:]))]
    if args.from_table1:
        for p, a, b in zip(parts, names[:-1], names[1:]):
            p.segments[0].name = f"{a}->{b}"
    traj = concatenate(parts)
    _summary(traj, params, limits_for(params, args.speed_ratio, args.safety), out)
    _write_plan(traj, args, out)
    return EXIT_OK


def cmd_plan_circle(args, out=sys.stdout):
    params = _params(args)
    eta_min, eta_max = math.radians(args.eta_min_deg), math.radians(args.eta_max_deg)
    pa, pb = math.radians(args.plane_alpha_deg), math.radians(args.plane_beta_deg)
    if args.from_table2:
        circle = table2_circle(eta_min, eta_max, pa, pb, args.speed_ratio)
        entry, exit_ = table2_entry(), table2_exit()
    else:
        if not (args.center and args.radius and args.entry and args.exit):
            raise UsageError("give --from-table2 or --center, --radius, --entry and --exit")
        o = tuple(math.radians(v) for v in _floats(args.orient_deg, 4, "--orient-deg"))
        circle = CircleSpec(center=_floats(args.center, 3, "--center"), radius=args.radius,
                          eta_min=eta_min, eta_max=eta_max, plane_alpha=pa, plane_beta=pb,
                          a_start=o[0], b_start=o[1], a_end=o[2], b_end=o[3],
                          speed_ratio=args.speed_ratio)
        entry, exit_ = _pose_arg(args.entry, "--entry"), _pose_arg(args.exit, "--exit")
    traj = plan_circular(circle, entry, exit_, params, args.rate, safety=args.safety,
                         rescale=not args.no_rescale)
    _summary(traj, params, limits_for(params, args.speed_ratio, args.safety), out)
    _write_plan(traj, args, out)
    return EXIT_OK


def cmd_plan_gcode(args, out=sys.stdout):
    params = _params(args)
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read program: {exc}") from None
    start = _pose_arg(args.start, "--start", args.mm_deg) if args.start else Pose(0.0, 0.0, 0.0, 0.0, 0.0)
    segments = parse_gcode(text, start)
    path = blend_corners(segments, params, args.corner_cap, start=start, speed_ratio=args.speed_ratio)
    traj = plan_gcode(path, params, args.rate, rescale=not args.no_rescale)
    if args.return_to_start:
        traj = close_loop(start, traj, params, args.speed_ratio, args.rate)
    print(f"{len(segments)} blocks, {len(path.primitives)} primitives, {len(path.corners)} corners",
          file=out)
    for c in path.corners:
        where = f"line {c.line}" if c.line is not None else f"corner {c.index}"
        print(f"  {where}: angle {math.degrees(c.angle):.3f} deg, radius {c.radius * 1e3:.4f} mm, "
              f"tangent distance {c.tangent_distance * 1e3:.4f} mm, speed {c.speed:.6f} m/s", file=out)
    _summary(traj, params, path.limits, out)
    _write_plan(traj, args, out)
    return EXIT_OK


# --------------------------------------------------------------------------
# sim


def _parse_disturbance(text):
    parts = text.split(":")
    if not 2 <= len(parts) <= 4:
        raise UsageError("--disturbance expects AXIS:VALUE[:T_START[:T_END]]")
    axis = _axis(parts[0])
    nums = _floats(",".join(parts[1:]), name="--disturbance")
    return Disturbance(axis, *nums)


def _parse_offset(items):
    offset = [0.0] * 5
    for text in items or ():
        axis, sep, value = text.partition(":")
        if not sep:
            raise UsageError("--offset expects AXIS:VALUE")
        offset[_axis(axis)] += _floats(value, 1, "--offset")[0]
    return tuple(offset)


def cmd_sim(args, out=sys.stdout):
    params = _params(args)
    if args.plan:
        try:
            plan = csvio.read_trajectory(args.plan)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read plan: {exc}") from None
    elif args.from_table1:
        plan = concatenate([plan_linear(table1_pose(a), table1_pose(b), params, args.speed_ratio)
                            for a, b in (("P1", "P2"), ("P2", "P3"), ("P3", "P4"))])
    else:
        raise UsageError("give --plan file.csv or --from-table1")
    if not len(plan):
        raise UsageError("plan is empty")
    sim = SimConfig(duration=args.duration,
                    disturbances=tuple(_parse_disturbance(d) for d in args.disturbance or ()),
                    initial_offset=_parse_offset(args.offset),
                    measure_time=True,
                    feedforward=args.feedforward, derivative=args.derivative,
                    integrator=args.integrator)
    trace = run_sim(plan, params, sim)
    err = trace.max_abs_error()
    u = np.abs(trace.u).max(axis=0)
    print(f"{len(trace)} control cycles, {trace.t[-1] - trace.t[0]:.6f} s", file=out)
    for i, name in enumerate(AXIS_NAMES):
        unit = "rad" if i < 2 else "m"
        print(f"  {name:7s} max |error| {err[i]:.3e} {unit}, max |u| {u[i]:.4f}", file=out)
    ct = trace.cycle_time * 1e6
    print(f"controller cycle time median {np.median(ct):.2f} us, max {ct.max():.2f} us", file=out)
    if args.out:
        csvio.write_trace(args.out, trace)
        print(f"wrote {len(trace)} rows to {args.out}", file=out)
    if trace.shutdown:
        print(f"SHUTDOWN at t = {trace.shutdown_time:.6f} s: |error| on {AXIS_NAMES[trace.shutdown_axis]} "
              f"above {params.error_shutdown * 1e3:g} mm", file=out)
        return EXIT_SHUTDOWN
    print("status: ok", file=out)
    return EXIT_OK


# --------------------------------------------------------------------------
# workspace


def cmd_check_workspace(args, out=sys.stdout):
    params = _params(args)
    if not args.cube > 0:
        raise UsageError("cube edge must be positive")
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    center = _floats(args.center, 3, "--center")
    fraction, failures = check_cube(params, args.cube, center, args.samples)
    total = args.samples ** 3
    print(f"cube edge {args.cube:g} m at ({', '.join(f'{c:g}' for c in center)}), "
          f"{total} wrist-center points: {100.0 * fraction:.2f}% inside", file=out)
    for p, res in failures[:args.list]:
        print(f"  ({p[0]:.4f}, {p[1]:.4f}, {p[2]:.4f}): {res.reason} {res.detail}", file=out)
    if len(failures) > args.list:
        print(f"  ... {len(failures) - args.list} more", file=out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value machine parameter file")

    p = _Parser(prog="hybridpkm", description="Kinematics, planning and control simulation "
                                              "for a 3-leg translational stage with a 2-axis wrist.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ik = sub.add_parser("ik", parents=[common], help="joint values for a tool-tip pose")
    for name in ("alpha", "beta", "x", "y", "z"):
        ik.add_argument(f"--{name}", type=float, default=0.0)
    ik.add_argument("--alpha_deg", type=float)
    ik.add_argument("--beta_deg", type=float)
    for name in "xyz":
        ik.add_argument(f"--{name}_mm", type=float)
    ik.add_argument("--mode", default="+++", help="working mode signs, e.g. +-+")
    ik.add_argument("--all-modes", action="store_true")
    ik.add_argument("--check-limits", action="store_true")
    ik.set_defaults(func=cmd_ik)

    fk = sub.add_parser("fk", parents=[common], help="tool-tip pose for joint values")
    fk.add_argument("--theta1", type=float, default=0.0)
    fk.add_argument("--theta2", type=float, default=0.0)
    fk.add_argument("--theta1_deg", type=float)
    fk.add_argument("--theta2_deg", type=float)
    fk.add_argument("--rho", required=True, help="rho1,rho2,rho3 in m")
    fk.add_argument("--mode", type=int, choices=ASSEMBLY_MODES, default=-1,
                    help="assembly mode: -1 home side of the parallel singularity, +1 far side")
    fk.add_argument("--all-modes", action="store_true")
    fk.set_defaults(func=cmd_fk)

    plan = sub.add_parser("plan", help="plan a trajectory and write it as CSV")
    psub = plan.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    planning = argparse.ArgumentParser(add_help=False, parents=[common])
    planning.add_argument("--rate", type=float, default=1500.0, help="sample rate in Hz")
    planning.add_argument("--speed-ratio", type=float, default=1.0)
    planning.add_argument("--safety", action="store_true", help="apply the safety speed ratio")
    planning.add_argument("--no-rescale", action="store_true")
    planning.add_argument("--out", help="CSV output path")

    line = psub.add_parser("line", parents=[planning], help="straight moves between poses")
    line.add_argument("--from-table1", nargs="+", metavar="NAME", help="reference poses, e.g. P1 P2")
    line.add_argument("--start", help="alpha,beta,x,y,z")
    line.add_argument("--end", help="alpha,beta,x,y,z")
    line.add_argument("--mm_deg", action="store_true", help="poses given in degrees and mm")
    line.set_defaults(func=cmd_plan_line)

    circle = psub.add_parser("circle", parents=[planning], help="approach, circle, retract")
    circle.add_argument("--from-table2", action="store_true")
    circle.add_argument("--center", help="x,y,z in m")
    circle.add_argument("--radius", type=float)
    circle.add_argument("--entry", help="alpha,beta,x,y,z")
    circle.add_argument("--exit", help="alpha,beta,x,y,z")
    circle.add_argument("--orient-deg", default="0,0,0,0", help="alpha_start,beta_start,alpha_end,beta_end")
    circle.add_argument("--eta-min-deg", type=float, default=0.0)
    circle.add_argument("--eta-max-deg", type=float, default=360.0)
    circle.add_argument("--plane-alpha-deg", type=float, default=0.0)
    circle.add_argument("--plane-beta-deg", type=float, default=0.0)
    circle.set_defaults(func=cmd_plan_circle)

    gc = psub.add_parser("gcode", parents=[planning], help="G00/G01 program with blended corners")
    gc.add_argument("file")
    gc.add_argument("--corner-cap", type=float, default=DEFAULT_CORNER_CAP, help="max blend radius in m")
    gc.add_argument("--start", help="alpha,beta,x,y,z before the first block")
    gc.add_argument("--mm_deg", action="store_true", help="--start given in degrees and mm")
    gc.add_argument("--return-to-start", action="store_true")
    gc.set_defaults(func=cmd_plan_gcode)

    sim = sub.add_parser("sim", parents=[common], help="closed-loop tracking simulation")
    sim.add_argument("--plan", help="trajectory CSV written by 'plan'")
    sim.add_argument("--from-table1", action="store_true", help="simulate the reference tour")
    sim.add_argument("--speed-ratio", type=float, default=1.0)
    sim.add_argument("--duration", type=float)
    sim.add_argument("--disturbance", action="append", metavar="AXIS:VALUE[:T0[:T1]]",
                     help="constant force (N) or torque (N m) on an axis (1-5 or name)")
    sim.add_argument("--offset", action="append", metavar="AXIS:VALUE",
                     help="initial position offset on an axis")
    sim.add_argument("--feedforward", choices=("period-mean", "sample"), default="period-mean")
    sim.add_argument("--derivative", choices=("error", "measured"), default="error")
    sim.add_argument("--integrator", choices=("exact", "semi-implicit"), default="exact")
    sim.add_argument("--out", help="trace CSV output path")
    sim.set_defaults(func=cmd_sim)

    ws = sub.add_parser("check-workspace", parents=[common], help="sample a cube of wrist centers")
    ws.add_argument("--cube", type=float, default=0.5, help="edge length in m")
    ws.add_argument("--center", default="0.25,0.25,0.25")
    ws.add_argument("--samples", type=int, default=11, help="samples per edge")
    ws.add_argument("--list", type=int, default=10, help="failures to print")
    ws.set_defaults(func=cmd_check_workspace)
    return p


def _glue_negative_values(argv):
    """``--z -72e-3`` -> ``--z=-72e-3``; argparse takes exponent forms for options."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and tok.startswith("-"):
            try:
                float(tok.split(",")[0])
            except ValueError:
                pass
            else:
                out[-1] = f"{out[-1]}={tok}"
                continue
        out.append(tok)
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args, out=out)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KinematicsError, GCodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

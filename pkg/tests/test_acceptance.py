"""Acceptance criteria, one test each, every one printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import io
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from hybridpkm import (MachineParams, Pose, evaluate_cycle, fk_full, full_inv_jacobian, full_inv_jacobian_dot,
                       ik_full, limits_for, pose_assembly_mode, quintic, run_sim, workspace_contains)
from hybridpkm.cli import main as cli_main
from hybridpkm.control import Disturbance, SimConfig
from hybridpkm.fixtures import table1_tour, table2_circle, table2_entry, table2_exit
from hybridpkm.gcode import centripetal_ratios, plan_program
from hybridpkm.trajectory import peak_ratios, plan_circular, plan_tour
from hybridpkm.workspace import check_cube

PARAMS = MachineParams()
SQUARE = Path(__file__).parent / "data" / "square.nc"
_capsys = None


@pytest.fixture(autouse=True)
def _grab_capsys(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def report(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    if _capsys is not None:
        with _capsys.disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)
    assert ok, line


def _uniform_poses(n, rng):
    """Tilts uniform in +-45 deg, wrist centers uniform in the 0.5 m design cube."""
    l = PARAMS.tool_length
    a = rng.uniform(-math.pi / 4, math.pi / 4, n)
    b = rng.uniform(-math.pi / 4, math.pi / 4, n)
    c = rng.uniform(0.0, 0.5, (n, 3))
    u = np.column_stack([-np.sin(b), np.sin(a) * np.cos(b), -np.cos(a) * np.cos(b)])
    tips = c + l * u
    return [Pose(a[i], b[i], *tips[i]) for i in range(n)]


def _nonsingular_poses(n, rng):
    """Random poses away from the wrist and leg singularities."""
    out = []
    while len(out) < n:
        (p,) = _uniform_poses(1, rng)
        q = ik_full(p, PARAMS)
        c = np.asarray(p[2:]) - PARAMS.tool_length * np.array(
            [-math.sin(p[1]), math.sin(p[0]) * math.cos(p[1]), -math.cos(p[0]) * math.cos(p[1])])
        if min(abs(q[2] - c[0]), abs(q[3] - c[1]), abs(q[4] - c[2])) > 0.05:
            out.append(p)
    return out


def test_ac01_kinematic_round_trip():
    rng = np.random.default_rng(1)
    poses = _uniform_poses(10_000, rng)
    assert all(workspace_contains(p, PARAMS) for p in poses[:500])
    t0 = time.perf_counter()
    pos_err = ang_err = 0.0
    far_side = 0
    for p in poses:
        mode = pose_assembly_mode(p, PARAMS)
        far_side += mode > 0
        b = fk_full(ik_full(p, PARAMS), PARAMS, mode)
        pos_err = max(pos_err, abs(b.x - p.x), abs(b.y - p.y), abs(b.z - p.z))
        ang_err = max(ang_err, abs(b.alpha - p.alpha), abs(b.beta - p.beta))
    elapsed = time.perf_counter() - t0
    ok = pos_err < 1e-9 and ang_err < 1e-12 and elapsed < 5.0
    report("AC1 kinematic round trip", ok,
           f"10^4 poses ({far_side} past the parallel singularity), max position error {pos_err:.2e} m (< 1e-9), max angle error {ang_err:.2e} rad "
           f"(< 1e-12), {elapsed:.2f} s (< 5 s)")


def test_ac02_jacobian_oracle():
    rng = np.random.default_rng(2)
    h = 1e-7
    worst = 0.0
    for p in _nonsingular_poses(1000, rng):
        J = full_inv_jacobian(p, ik_full(p, PARAMS), PARAMS)
        p = np.asarray(p)
        fd = np.column_stack([(np.array(ik_full(p + h * e, PARAMS)) - np.array(ik_full(p - h * e, PARAMS)))
                              / (2 * h) for e in np.eye(5)])
        worst = max(worst, np.max(np.abs(J - fd)) / np.max(np.abs(fd)))
    report("AC2 Jacobian vs finite differences", worst < 1e-6,
           f"10^3 configurations, max relative error {worst:.2e} (< 1e-6)")


def test_ac03_jacobian_derivative_oracle():
    rng = np.random.default_rng(3)
    h = 1e-6
    worst = 0.0
    for p in _nonsingular_poses(1000, rng):
        twist = np.concatenate([rng.uniform(-3.27, 3.27, 2), rng.uniform(-1.2, 1.2, 3)])
        Jd = full_inv_jacobian_dot(p, ik_full(p, PARAMS), twist, PARAMS)
        pp, pm = np.asarray(p) + h * twist, np.asarray(p) - h * twist
        fd = (full_inv_jacobian(pp, ik_full(pp, PARAMS), PARAMS)
              - full_inv_jacobian(pm, ik_full(pm, PARAMS), PARAMS)) / (2 * h)
        worst = max(worst, np.max(np.abs(Jd - fd)) / np.max(np.abs(fd)))
    report("AC3 Jacobian rate vs time finite differences", worst < 1e-5,
           f"10^3 (configuration, twist) pairs, max relative error {worst:.2e} (< 1e-5)")


def test_ac04_quintic_exactness():
    worst_end = worst_mid = 0.0
    for t_f in (0.05, 0.19351, 0.4799, 1.0, 3.0, 12.0):
        r0, rd0, rdd0 = quintic(0.0, t_f)
        r1, rd1, rdd1 = quintic(t_f, t_f)
        worst_end = max(worst_end, abs(r0), abs(r1 - 1), abs(rd0), abs(rd1), abs(rdd0), abs(rdd1))
        worst_mid = max(worst_mid, abs(quintic(t_f / 2, t_f)[1] - 1.875 / t_f))
    ok = worst_end <= 1e-12 and worst_mid <= 1e-9
    report("AC4 quintic exactness", ok,
           f"max boundary deviation {worst_end:.1e} (<= 1e-12), max |r'(t_f/2) - 1.875/t_f| "
           f"{worst_mid:.1e} (<= 1e-9)")


def test_ac05_table1_tour():
    t0 = time.perf_counter()
    traj = plan_tour(table1_tour(), PARAMS, sample_rate=1500.0)
    elapsed = time.perf_counter() - t0
    seg = traj.segments[1]
    in_leg = (traj.t >= seg.t_start - 1e-12) & (traj.t <= seg.t_start + seg.t_f + 1e-12)
    peak = float(np.linalg.norm(traj.V[in_leg, 2:], axis=1).max())
    ratios = peak_ratios(traj, limits_for(PARAMS))
    worst = max(v for k, v in ratios.items() if k[2:] in ("theta1", "theta2", "rho1", "rho2", "rho3"))
    ok = (abs(seg.t_f_initial - 0.4799) <= 1e-4 and abs(peak - 1.2) <= 0.012 and worst <= 1 + 1e-9
          and elapsed < 5.0)
    report("AC5 reference tour", ok,
           f"P2->P3 t_f before rescale {seg.t_f_initial:.5f} s (0.4799 +- 1e-4), peak speed after rescale "
           f"{peak:.4f} m/s (1.2 +- 1%), worst joint ratio {worst:.6f} (<= 1+1e-9), planned in "
           f"{elapsed:.2f} s (< 5 s)")


def test_ac06_table2_circle():
    traj = plan_circular(table2_circle(), table2_entry(), table2_exit(), PARAMS)
    worst = max(peak_ratios(traj, limits_for(PARAMS)).values())
    dq = np.diff(traj.q, axis=0)
    trap = 0.5 * (traj.q_dot[1:] + traj.q_dot[:-1]) * np.diff(traj.t)[:, None]
    jump = float(np.max(np.abs(dq - trap)) / np.max(np.abs(dq)))
    ok = worst <= 1 + 1e-9 and jump <= 1e-3
    report("AC6 reference circle", ok,
           f"full turn in a horizontal plane, worst joint/Cartesian ratio {worst:.6f} (<= 1+1e-9), "
           f"sample-to-sample joint increments match q_dot to {jump:.1e} relative (<= 1e-3)")


def test_ac07_exact_model_control():
    plan = plan_tour(table1_tour(), PARAMS)
    clean = run_sim(plan, PARAMS)
    e_clean = float(clean.max_abs_error().max())
    t_step = 0.3
    dist = run_sim(plan, PARAMS, SimConfig(disturbances=(Disturbance(2, 100.0, t_step),)))
    e_peak = float(np.abs(dist.error[:, 2]).max())
    late = dist.t >= t_step + 1.0
    e_late = float(np.abs(dist.error[late, 2]).max())
    ok = e_clean < 1e-6 and not clean.shutdown and not dist.shutdown and e_late < 5e-5
    report("AC7 exact-model control", ok,
           f"undisturbed max joint error {e_clean:.2e} (< 1e-6); 100 N step on rho1: peak {e_peak:.2e} m, "
           f"{e_late:.2e} m from 1 s after the step (< 5e-5)")


def test_ac08_safety_shutdown():
    plan = plan_tour(table1_tour()[:2], PARAMS)
    trace = run_sim(plan, PARAMS, SimConfig(initial_offset=(0, 0, 0.0031, 0, 0)))
    latency = trace.shutdown_time - plan.t[0] if trace.shutdown else math.inf
    code = cli_main(["sim", "--from-table1", "--offset", "rho1:0.0031"], out=io.StringIO())
    ok = trace.shutdown and latency <= 1 / 1500 and code == 3
    report("AC8 safety shutdown", ok,
           f"3.1 mm offset on rho1 detected after {latency * 1e3:.3f} ms (<= 0.667 ms), CLI exit code {code} "
           f"(3)")


def test_ac09_gcode_pipeline():
    traj, path = plan_program(SQUARE.read_text(), PARAMS)
    gaps, turns = path.junction_gaps()
    gap = max(gaps)
    turn = max(t for t in turns if t is not None)
    cent = centripetal_ratios(traj, path, PARAMS)
    ok = len(path.corners) == 4 and gap <= 1e-12 and turn <= 1e-9 and len(cent) and cent.max() <= 1 + 1e-9
    report("AC9 G-code pipeline", ok,
           f"square with {len(path.corners)} blended corners, position gap {gap:.1e} m (<= 1e-12), tangent "
           f"jump {turn:.1e} rad (<= 1e-9), max centripetal ratio {cent.max():.6f} over {len(cent)} arc "
           f"samples (<= 1+1e-9)")


def test_ac10_cycle_time():
    rng = np.random.default_rng(10)
    poses = _nonsingular_poses(50, rng)
    twists = rng.uniform(-1, 1, (50, 5))
    for p, v in zip(poses, twists):
        evaluate_cycle(p, v, PARAMS)
    batch = 100
    per_call = []
    for rep in range(200):
        p, v = poses[rep % 50], twists[rep % 50]
        t0 = time.perf_counter()
        for _ in range(batch):
            evaluate_cycle(p, v, PARAMS)
        per_call.append((time.perf_counter() - t0) / batch)
    median = float(np.median(per_call)) * 1e6
    worst = float(np.max(per_call)) * 1e6
    ok = median < 10.0 and worst < 50.0
    report("AC10 per-cycle evaluation time", ok,
           f"IK + inverse Jacobian + its rate in one call: median {median:.2f} us (< 10 us), "
           f"slowest batch mean {worst:.2f} us (< 50 us)")


def test_ac11_workspace_cube():
    fraction, failures = check_cube(PARAMS, 0.5, (0.25, 0.25, 0.25), 11)
    report("AC11 workspace cube", fraction == 1.0,
           f"11^3 wrist-center grid over the 0.5 m cube at (0.25, 0.25, 0.25): {100 * fraction:.2f}% inside "
           f"(100%), {len(failures)} failures")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_ac") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)

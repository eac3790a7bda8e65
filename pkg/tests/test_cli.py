import io
import re
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hybridpkm import MachineParams, run_sim
from hybridpkm.cli import main
from hybridpkm.csvio import (TRACE_COLUMNS, TRAJECTORY_COLUMNS, read_trace, read_trajectory, write_trace,
                             write_trajectory)
from hybridpkm.fixtures import table1_tour
from hybridpkm.trajectory import plan_tour

DATA = Path(__file__).parent / "data"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_ik_home():
    code, text = run("ik", "--alpha", "0", "--beta", "0", "--x", "0", "--y", "0", "--z", "-0.09")
    assert code == 0
    assert "theta1=0 theta2=0 rho1=0.75 rho2=0.75 rho3=0.75" in text


def test_ik_negative_exponent_value():
    code, text = run("ik", "--z", "-72e-3")
    assert code == 0 and "rho3=0.768" in text


def test_ik_mm_deg_flags_and_modes():
    code, text = run("ik", "--alpha_deg", "10", "--z_mm", "-90", "--all-modes")
    assert code == 0 and len(text.splitlines()) == 8


def test_ik_tilt_limit_exit_2(capsys):
    code, _ = run("ik", "--alpha_deg", "60", "--z", "-0.09")
    assert code == 2
    assert "tilt limit exceeded" in capsys.readouterr().err


def test_ik_unreachable_exit_2():
    assert run("ik", "--y", "0.9", "--z", "0.9")[0] == 2


def test_fk_home():
    code, text = run("fk", "--theta1", "0", "--theta2", "0", "--rho", "0.75,0.75,0.75")
    assert code == 0 and "alpha=0 beta=0 x=0 y=0 z=-0.09" in text


def test_fk_bad_rho_usage():
    assert run("fk", "--rho", "0.75,0.75")[0] == 1


def test_usage_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["ik", "--x", "abc"])
    assert exc.value.code == 1


def test_config_file(tmp_path):
    cfg = tmp_path / "m.cfg"
    cfg.write_text("tool_length = 0.1\n")
    code, text = run("fk", "--config", str(cfg), "--rho", "0.75,0.75,0.75")
    assert code == 0 and "z=-0.1" in text
    cfg.write_text("tool_length = 0.01\n")
    assert run("fk", "--config", str(cfg), "--rho", "0.75,0.75,0.75")[0] == 1
    assert run("fk", "--config", str(tmp_path / "missing"), "--rho", "1,1,1")[0] == 1


def test_plan_line_table1(tmp_path):
    out = tmp_path / "p.csv"
    code, text = run("plan", "line", "--from-table1", "P1", "P2", "--out", str(out))
    assert code == 0
    m = re.search(r"t_f before rescale ([0-9.]+) s", text)
    assert abs(float(m.group(1)) - 0.1937) < 2e-4
    traj = read_trajectory(out)
    assert len(traj) > 100


def test_plan_line_explicit_and_mm_deg():
    code, text = run("plan", "line", "--start", "0,0,0,0,-90", "--end", "10,0,50,0,-90", "--mm_deg")
    assert code == 0 and "segment 0" in text


def test_plan_line_outside_workspace_exit_2(capsys):
    code, _ = run("plan", "line", "--start", "0,0,0,0,-0.09", "--end", "0,0,0.7,0,-0.09")
    assert code == 2 and "t = " in capsys.readouterr().err


def test_plan_circle_table2(tmp_path):
    from hybridpkm.fixtures import table2_entry, table2_exit
    out = tmp_path / "c.csv"
    assert run("plan", "circle", "--from-table2", "--out", str(out))[0] == 0
    traj = read_trajectory(out)
    assert np.array_equal(traj.pose[0], table2_entry()) and np.array_equal(traj.pose[-1], table2_exit())


def test_plan_gcode_report(tmp_path):
    out = tmp_path / "g.csv"
    code, text = run("plan", "gcode", str(DATA / "square.nc"), "--out", str(out))
    assert code == 0
    assert text.count("radius 10.0000 mm") == 4
    assert read_trajectory(out).t[-1] > 0


def test_plan_gcode_errors(tmp_path, capsys):
    bad = tmp_path / "bad.nc"
    bad.write_text("G0 X1\nG02 X1 Y1\n")
    assert run("plan", "gcode", str(bad))[0] == 2
    assert "line 2" in capsys.readouterr().err
    assert run("plan", "gcode", str(tmp_path / "none.nc"))[0] == 1


def test_sim_table1_ok(tmp_path):
    out = tmp_path / "trace.csv"
    code, text = run("sim", "--from-table1", "--out", str(out))
    assert code == 0 and "status: ok" in text
    errs = [float(v) for v in re.findall(r"max \|error\| ([0-9.e+-]+)", text)]
    assert len(errs) == 5 and max(errs) < 1e-6
    assert read_trace(out)["t"].shape[0] == 2716


def test_sim_disturbance_summary():
    code, text = run("sim", "--from-table1", "--disturbance", "3:100")
    assert code == 0
    rho1 = float(re.search(r"rho1 +max \|error\| ([0-9.e+-]+)", text).group(1))
    assert 1e-5 < rho1 < 5e-5


def test_sim_offset_shutdown_exit_3():
    code, text = run("sim", "--from-table1", "--offset", "rho1:0.005")
    assert code == 3 and "SHUTDOWN" in text


def test_sim_bad_axis_usage():
    assert run("sim", "--from-table1", "--offset", "7:0.1")[0] == 1
    assert run("sim")[0] == 1


def test_check_workspace():
    code, text = run("check-workspace", "--cube", "0.5", "--center", "0.25,0.25,0.25", "--samples", "11")
    assert code == 0 and "100.00% inside" in text
    code, text = run("check-workspace", "--cube", "2", "--samples", "5")
    assert code == 0 and "no-real-IK" in text
    assert run("check-workspace", "--cube", "0")[0] == 1


def test_csv_round_trip_bit_identical(tmp_path):
    params = MachineParams()
    plan = plan_tour(table1_tour()[:2], params)
    write_trajectory(tmp_path / "p.csv", plan)
    back = read_trajectory(tmp_path / "p.csv")
    for name in ("t", "pose", "V", "A", "q", "q_dot", "q_ddot"):
        assert np.array_equal(getattr(back, name), getattr(plan, name))
    a, b = run_sim(plan, params), run_sim(back, params)
    for name in ("q_actual", "error", "u"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    write_trace(tmp_path / "t.csv", a)
    tr = read_trace(tmp_path / "t.csv")
    assert np.array_equal(tr["error"], a.error)


def test_csv_columns(tmp_path):
    assert TRAJECTORY_COLUMNS[:6] == ("t", "alpha", "beta", "x", "y", "z")
    assert len(TRAJECTORY_COLUMNS) == 31 and len(TRACE_COLUMNS) == 32
    (tmp_path / "x.csv").write_text("t,alpha\n0,0\n")
    with pytest.raises(ValueError, match="missing columns"):
        read_trajectory(tmp_path / "x.csv")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hybridpkm", "fk", "--rho", "0.75,0.75,0.75"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "z=-0.09" in r.stdout

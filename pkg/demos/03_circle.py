"""A full circle with approach and retreat moves.

The circle uses the same quintic law along its arc length so it starts and
ends at rest; the planner then checks every sample against the joint limits.

Run: python3 demos/03_circle.py
"""

import numpy as np

from hybridpkm import MachineParams, limits_for, plan_circular
from hybridpkm.fixtures import table2_circle, table2_entry, table2_exit
from hybridpkm.trajectory import peak_ratios

params = MachineParams()
circle = table2_circle()
traj = plan_circular(circle, table2_entry(), table2_exit(), params)

for seg in traj.segments:
    print(f"{seg.name:12s} t_f {seg.t_f:.4f} s (stretched x{seg.multiplier:.3f})")

arc = traj.segments[1]
on_arc = (traj.t >= arc.t_start) & (traj.t <= arc.t_start + arc.t_f)
radius = np.linalg.norm(traj.pose[on_arc, 2:4] - np.asarray(circle.center)[:2], axis=1)
print(f"\nradius along the arc: {radius.min():.6f} .. {radius.max():.6f} m")
print(f"peak tool speed {np.linalg.norm(traj.V[:, 2:], axis=1).max():.4f} m/s")
worst = max(peak_ratios(traj, limits_for(params)).items(), key=lambda kv: kv[1])
print(f"closest to a limit: {worst[0]} at {worst[1]:.4f}")
